use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use traceqa_core::reliability::{
    group_report, report_json, report_markdown, scatter_csv, AnnotatorRecord, ReliabilityReport,
    ScoringConfig, StudyData,
};
use traceqa_core::stimulus::{profile_to_signal, Modality, StimulusProfile};
use traceqa_service::Store;

use crate::args::ReportArgs;
use crate::error::{create_dir, read_text, write_bytes, CliError, CliResult};
use crate::score::read_traces;

const DEFAULT_GROUP: &str = "default";

pub fn config(args: &ReportArgs) -> ScoringConfig {
    ScoringConfig {
        rate_hz: args.rate_hz,
        sda_variant: args.sda_variant,
        threshold: args.threshold,
        ..ScoringConfig::default()
    }
}

fn read_profile(path: &Path, modality: Modality) -> CliResult<StimulusProfile> {
    let profile = StimulusProfile::from_json(&read_text(path)?)?;
    profile.require(modality)?;
    Ok(profile)
}

fn read_groups(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = read_text(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let bad = |e: csv::Error| CliError::Data(format!("{}: {e}", path.display()));
    let headers = rdr.headers().map_err(bad)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["participant_id", "group"] {
        return Err(CliError::Data(format!(
            "{}: header must be `participant_id,group`",
            path.display()
        )));
    }
    let mut groups = BTreeMap::new();
    for row in rdr.records() {
        let row = row.map_err(bad)?;
        groups.insert(row[0].to_string(), row[1].to_string());
    }
    Ok(groups)
}

/// Report inputs from trace CSVs and the two QA profiles.
pub fn study_from_csv(args: &ReportArgs) -> CliResult<StudyData> {
    let (Some(visual), Some(auditory)) = (&args.visual_profile, &args.auditory_profile) else {
        return Err(CliError::Usage(
            "report needs --store and --study, or --traces with --visual-profile and --auditory-profile"
                .into(),
        ));
    };
    let visual = read_profile(visual, Modality::Visual)?;
    let auditory = read_profile(auditory, Modality::Auditory)?;
    let membership = match &args.groups {
        Some(path) => read_groups(path)?,
        None => BTreeMap::new(),
    };

    let mut records: BTreeMap<String, AnnotatorRecord> = BTreeMap::new();
    let mut task_durations = BTreeMap::new();
    for path in &args.traces {
        for trace in read_traces(path)? {
            let record = records
                .entry(trace.participant_id.clone())
                .or_insert_with(|| AnnotatorRecord {
                    annotator_id: trace.participant_id.clone(),
                    ..AnnotatorRecord::default()
                });
            if trace.stimulus_id == visual.stimulus_id {
                record.visual = Some(trace);
            } else if trace.stimulus_id == auditory.stimulus_id {
                record.auditory = Some(trace);
            } else {
                let duration = args.task_duration_ms.ok_or_else(|| {
                    CliError::Usage(format!(
                        "trace for task stimulus {} needs --task-duration-ms",
                        trace.stimulus_id
                    ))
                })?;
                task_durations.insert(trace.stimulus_id.clone(), duration);
                record.tasks.insert(trace.stimulus_id.clone(), trace);
            }
        }
    }

    let mut groups: BTreeMap<String, Vec<AnnotatorRecord>> = BTreeMap::new();
    for (pid, record) in records {
        let group = membership.get(&pid).map_or(DEFAULT_GROUP, String::as_str);
        groups.entry(group.to_string()).or_default().push(record);
    }
    Ok(StudyData {
        visual_gt: profile_to_signal(&visual, args.rate_hz)?,
        auditory_gt: profile_to_signal(&auditory, args.rate_hz)?,
        task_durations,
        groups,
    })
}

pub fn build(args: &ReportArgs) -> CliResult<ReliabilityReport> {
    let config = config(args);
    match (&args.store, &args.study) {
        (Some(store), Some(study)) => {
            if !store.is_dir() {
                return Err(CliError::io(
                    store.display(),
                    std::io::Error::new(std::io::ErrorKind::NotFound, "store directory not found"),
                ));
            }
            Ok(Store::open(store)?.report(study, &config)?)
        }
        _ => Ok(group_report(&study_from_csv(args)?, &config)?),
    }
}

/// Writes the report files to `--out` and prints the Markdown summary.
pub fn run(args: &ReportArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let report = build(args)?;
    if let Some(out) = &args.out {
        create_dir(out)?;
        write_bytes(&out.join("report.json"), report_json(&report))?;
        write_bytes(&out.join("report.md"), report_markdown(&report))?;
        write_bytes(&out.join("scatter.csv"), scatter_csv(&report))?;
    }
    let _ = stdout.write_all(report_markdown(&report).as_bytes());
    Ok(())
}
