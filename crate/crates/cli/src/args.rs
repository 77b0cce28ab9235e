use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use traceqa_core::agreement::SdaVariant;
use traceqa_core::simulate::AnnotatorKind;
use traceqa_core::stimulus::Modality;

#[derive(Debug, Parser)]
#[command(name = "traceqa", version, about = "Quality assurance for continuous annotation traces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a QA stimulus: profile, ground truth and rendered media.
    Gen(GenArgs),
    /// Score traces against one ground truth.
    Score(ScoreArgs),
    /// Build the reliability report for a study.
    Report(ReportArgs),
    /// Simulate a cohort of annotators.
    Simulate(SimulateArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

fn parse_modality(s: &str) -> Result<Modality, String> {
    s.parse().map_err(|e: traceqa_core::Error| e.to_string())
}

fn parse_variant(s: &str) -> Result<SdaVariant, String> {
    s.parse().map_err(|e: traceqa_core::Error| e.to_string())
}

/// `kind=count` pairs separated by commas.
#[derive(Debug, Clone, PartialEq)]
pub struct Cohort(pub Vec<(AnnotatorKind, usize)>);

fn parse_cohort(s: &str) -> Result<Cohort, String> {
    let mut members = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (kind, count) = part
            .split_once('=')
            .ok_or_else(|| format!("expected kind=count, got {part:?}"))?;
        let kind: AnnotatorKind = kind.trim().parse().map_err(|e: traceqa_core::Error| e.to_string())?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("bad count in {part:?}"))?;
        members.push((kind, count));
    }
    if members.iter().map(|m| m.1).sum::<usize>() == 0 {
        return Err("cohort is empty".into());
    }
    Ok(Cohort(members))
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub seed: u64,
    /// visual or auditory
    #[arg(long, value_parser = parse_modality)]
    pub modality: Modality,
    #[arg(long)]
    pub out: PathBuf,
    /// Stimulus id; defaults to `qa-<modality>-<seed>`.
    #[arg(long)]
    pub id: Option<String>,
    #[arg(long)]
    pub duration_ms: Option<u64>,
    #[arg(long)]
    pub segments: Option<usize>,
    #[arg(long)]
    pub hold_fraction: Option<f64>,
    /// Rate of the ground-truth CSV.
    #[arg(long, default_value_t = 10.0)]
    pub rate_hz: f64,
    #[arg(long, default_value_t = 30)]
    pub fps: u32,
    #[arg(long, default_value_t = 64)]
    pub width: u32,
    #[arg(long, default_value_t = 48)]
    pub height: u32,
    #[arg(long, default_value_t = 44_100)]
    pub sample_rate: u32,
    /// Also register the profile in this store directory.
    #[arg(long)]
    pub store: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("reference").required(true).args(["groundtruth", "profile"])))]
pub struct ScoreArgs {
    /// Trace CSV, long (`participant_id,stimulus_id,timestamp_ms,value`) or
    /// two-column (`timestamp_ms,value`, ids from the file name). Repeatable.
    #[arg(long, required = true)]
    pub traces: Vec<PathBuf>,
    /// `time_ms,level` ground truth.
    #[arg(long)]
    pub groundtruth: Option<PathBuf>,
    /// `.profile.json`, sampled at `--rate-hz`.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Score only traces of this stimulus. Defaults to the profile's id.
    #[arg(long)]
    pub stimulus: Option<String>,
    #[arg(long, default_value_t = 10.0)]
    pub rate_hz: f64,
    #[arg(long, value_parser = parse_variant, default_value = "product")]
    pub sda_variant: SdaVariant,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Store directory written by `traceqa serve`.
    #[arg(long, requires = "study", conflicts_with_all = ["traces", "visual_profile", "auditory_profile", "groups"])]
    pub store: Option<PathBuf>,
    #[arg(long, requires = "store")]
    pub study: Option<String>,
    /// Long-format trace CSV. Repeatable.
    #[arg(long)]
    pub traces: Vec<PathBuf>,
    #[arg(long)]
    pub visual_profile: Option<PathBuf>,
    #[arg(long)]
    pub auditory_profile: Option<PathBuf>,
    /// `participant_id,group` CSV; unlisted participants join `default`.
    #[arg(long)]
    pub groups: Option<PathBuf>,
    /// Duration of every task stimulus in CSV mode.
    #[arg(long)]
    pub task_duration_ms: Option<u64>,
    #[arg(long, default_value_t = 10.0)]
    pub rate_hz: f64,
    #[arg(long, value_parser = parse_variant, default_value = "product")]
    pub sda_variant: SdaVariant,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub threshold: f64,
    /// Directory for report.json, report.md and scatter.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("reference").required(true).multiple(true).args(["profile", "groundtruth"])))]
pub struct SimulateArgs {
    /// Stimulus profile to annotate. Repeatable.
    #[arg(long)]
    pub profile: Vec<PathBuf>,
    /// `time_ms,level` reference; the stimulus id is the file stem. Repeatable.
    #[arg(long)]
    pub groundtruth: Vec<PathBuf>,
    /// For example `diligent=5,random=5`.
    #[arg(long, value_parser = parse_cohort)]
    pub cohort: Cohort,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Reaction lag; lagged annotators default to 500 ms.
    #[arg(long)]
    pub lag_ms: Option<u64>,
    /// Gaussian jitter; noisy annotators default to 0.05.
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Inattentive annotators default to 0.5.
    #[arg(long)]
    pub attention: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub rate_hz: f64,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub store: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: String,
}
