use std::io::Write;
use std::path::Path;

use traceqa_core::io::{read_long_str, read_two_column};
use traceqa_core::reliability::{score_against, ScoringConfig};
use traceqa_core::stimulus::{profile_to_signal, signal_from_csv, StimulusProfile};
use traceqa_core::EventTrace;

use crate::args::ScoreArgs;
use crate::error::{read_text, CliError, CliResult};

/// Reads a long-format or two-column trace CSV, choosing by header.
pub fn read_traces(path: &Path) -> CliResult<Vec<EventTrace>> {
    let text = read_text(path)?;
    let header = text.lines().next().unwrap_or("").replace(' ', "");
    if header == "timestamp_ms,value" {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        Ok(vec![read_two_column(text.as_bytes(), name)?])
    } else {
        Ok(read_long_str(&text)?)
    }
}

/// Prints `annotator_id,stimulus_id,sda`, sorted by annotator then stimulus.
pub fn run(args: &ScoreArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let config = ScoringConfig {
        rate_hz: args.rate_hz,
        sda_variant: args.sda_variant,
        ..ScoringConfig::default()
    };
    let (reference, default_stimulus) = match (&args.profile, &args.groundtruth) {
        (Some(path), _) => {
            let profile = StimulusProfile::from_json(&read_text(path)?)?;
            (profile_to_signal(&profile, args.rate_hz)?, Some(profile.stimulus_id))
        }
        (None, Some(path)) => (signal_from_csv(&read_text(path)?)?, None),
        (None, None) => return Err(CliError::Usage("--profile or --groundtruth is required".into())),
    };
    let stimulus = args.stimulus.clone().or(default_stimulus);

    let mut traces = Vec::new();
    for path in &args.traces {
        traces.extend(read_traces(path)?);
    }
    traces.retain(|t| stimulus.as_deref().is_none_or(|s| t.stimulus_id == s));
    if traces.is_empty() {
        return Err(CliError::Data(match stimulus {
            Some(s) => format!("insufficient data: no traces for stimulus {s}"),
            None => "insufficient data: no traces".into(),
        }));
    }
    traces.sort_by(|a, b| {
        (&a.participant_id, &a.stimulus_id).cmp(&(&b.participant_id, &b.stimulus_id))
    });

    let _ = writeln!(stdout, "annotator_id,stimulus_id,sda");
    for trace in &traces {
        let sda = score_against(trace, &reference, &config)?;
        let _ = writeln!(stdout, "{},{},{}", trace.participant_id, trace.stimulus_id, sda);
    }
    Ok(())
}
