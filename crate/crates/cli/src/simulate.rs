use std::io::Write;
use std::path::Path;

use traceqa_core::io::long_to_string;
use traceqa_core::seed::derive_seed;
use traceqa_core::simulate::{simulate_annotator, AnnotatorKind, AnnotatorModel};
use traceqa_core::stimulus::{profile_to_signal, signal_from_csv, StimulusProfile};
use traceqa_core::SampledSignal;

use crate::args::{Cohort, SimulateArgs};
use crate::error::{read_text, write_bytes, CliResult};

/// Participant ids and models, numbered per kind: `diligent-01`, `random-01`, ...
pub fn cohort_models(cohort: &Cohort, args: &SimulateArgs) -> Vec<(String, AnnotatorModel)> {
    let mut out = Vec::new();
    for &(kind, count) in &cohort.0 {
        for i in 1..=count {
            let pid = format!("{kind}-{i:02}");
            let mut model = AnnotatorModel::new(kind, derive_seed(args.seed, &pid));
            match kind {
                AnnotatorKind::Lagged => model.lag_ms = 500,
                AnnotatorKind::Noisy => model.noise_sigma = 0.05,
                AnnotatorKind::Inattentive => model.attention = 0.5,
                _ => {}
            }
            if let Some(lag) = args.lag_ms {
                model.lag_ms = lag;
            }
            if let Some(sigma) = args.noise_sigma {
                model.noise_sigma = sigma;
            }
            if let Some(a) = args.attention {
                model.attention = a;
            }
            out.push((pid, model));
        }
    }
    out
}

fn references(args: &SimulateArgs) -> CliResult<Vec<(String, SampledSignal)>> {
    let mut refs = Vec::new();
    for path in &args.profile {
        let profile = StimulusProfile::from_json(&read_text(path)?)?;
        refs.push((profile.stimulus_id.clone(), profile_to_signal(&profile, args.rate_hz)?));
    }
    for path in &args.groundtruth {
        let stem = Path::new(path)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("groundtruth")
            .to_string();
        refs.push((stem, signal_from_csv(&read_text(path)?)?));
    }
    Ok(refs)
}

/// Writes one long-format CSV holding every (participant, stimulus) trace.
pub fn run(args: &SimulateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let refs = references(args)?;
    let mut traces = Vec::new();
    for (pid, model) in cohort_models(&args.cohort, args) {
        for (sid, gt) in &refs {
            traces.push(simulate_annotator(gt, &model, &pid, sid)?);
        }
    }
    traces.sort_by(|a, b| {
        (&a.participant_id, &a.stimulus_id).cmp(&(&b.participant_id, &b.stimulus_id))
    });
    let csv = long_to_string(&traces);
    match &args.out {
        Some(path) => write_bytes(path, csv),
        None => {
            let _ = stdout.write_all(csv.as_bytes());
            Ok(())
        }
    }
}
