//! Annotator reliability: QA scoring, the threshold classifier, task-side
//! reliability against leave-one-out gold standards, and the confusion
//! analysis relating the two.

mod export;
mod report;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::agreement::{sda_signals, SdaVariant};
use crate::error::{Error, Result};
use crate::gold::{leave_one_out_gold, AlignedTraceSet};
use crate::signal::{prepare_trace, EventTrace, SampledSignal, DEFAULT_INITIAL_VALUE, DEFAULT_RATE_HZ};

pub use export::{report_json, report_markdown, scatter_csv};
pub use report::{
    group_report, AnnotatorRecord, AnnotatorReport, GroupComparison, GroupReport, QaTestMetrics,
    ReliabilityReport, StimulusSda, StudyData, TaskSummary,
};

/// Analysis settings shared by QA scoring and reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringConfig {
    pub rate_hz: f64,
    pub sda_variant: SdaVariant,
    /// Annotators whose mean SDA is strictly below this are unreliable.
    pub threshold: f64,
    pub initial_value: f64,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self {
            rate_hz: DEFAULT_RATE_HZ,
            sda_variant: SdaVariant::Product,
            threshold: 0.0,
            initial_value: DEFAULT_INITIAL_VALUE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReliabilityLabel {
    Reliable,
    Unreliable,
}

impl ReliabilityLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ReliabilityLabel::Reliable => "reliable",
            ReliabilityLabel::Unreliable => "unreliable",
        }
    }

    fn from_score(score: f64, threshold: f64) -> Self {
        if score < threshold {
            ReliabilityLabel::Unreliable
        } else {
            ReliabilityLabel::Reliable
        }
    }
}

impl fmt::Display for ReliabilityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// SDA of one annotator on the two QA tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaScore {
    pub annotator_id: String,
    pub sda_visual: f64,
    pub sda_auditory: f64,
    pub mean_qa_sda: f64,
}

impl QaScore {
    pub fn new(annotator_id: impl Into<String>, sda_visual: f64, sda_auditory: f64) -> Self {
        Self {
            annotator_id: annotator_id.into(),
            sda_visual,
            sda_auditory,
            mean_qa_sda: (sda_visual + sda_auditory) / 2.0,
        }
    }
}

/// Scores an annotator's two QA traces against the stimulus ground truths.
///
/// Each trace is resampled onto its ground truth's grid, normalized, and
/// compared with SDA. The ground truths must be sampled at `config.rate_hz`.
pub fn score_qa(
    annotator_id: &str,
    visual_trace: Option<&EventTrace>,
    auditory_trace: Option<&EventTrace>,
    visual_gt: &SampledSignal,
    auditory_gt: &SampledSignal,
    config: &ScoringConfig,
) -> Result<QaScore> {
    let (Some(visual), Some(auditory)) = (visual_trace, auditory_trace) else {
        return Err(Error::IncompleteQa(annotator_id.to_string()));
    };
    let sda_visual = score_against(visual, visual_gt, config)?;
    let sda_auditory = score_against(auditory, auditory_gt, config)?;
    Ok(QaScore::new(annotator_id, sda_visual, sda_auditory))
}

/// SDA of one raw trace against a reference signal.
pub fn score_against(
    trace: &EventTrace,
    reference: &SampledSignal,
    config: &ScoringConfig,
) -> Result<f64> {
    if reference.sample_rate_hz() != config.rate_hz {
        return Err(Error::Shape(format!(
            "reference sampled at {} Hz, analysis rate is {} Hz",
            reference.sample_rate_hz(),
            config.rate_hz
        )));
    }
    let prepared = prepare_trace(trace, reference, config.initial_value)?;
    sda_signals(&prepared, reference, config.sda_variant)
}

/// Unreliable iff the mean QA SDA is strictly below `threshold`.
pub fn classify(score: &QaScore, threshold: f64) -> ReliabilityLabel {
    ReliabilityLabel::from_score(score.mean_qa_sda, threshold)
}

/// Task-side reliability of one annotator across subjective stimuli.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskReliability {
    pub per_stimulus: Vec<StimulusSda>,
    pub mean_sda: f64,
    pub label: ReliabilityLabel,
}

/// Scores `annotator_id` on every set against the gold standard of the
/// other annotators in that set.
pub fn task_reliability(
    annotator_id: &str,
    sets: &[AlignedTraceSet],
    variant: SdaVariant,
    threshold: f64,
) -> Result<TaskReliability> {
    if sets.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no task data for {annotator_id}"
        )));
    }
    let per_stimulus = sets
        .iter()
        .map(|set| {
            let own = set.trace_of(annotator_id).ok_or_else(|| {
                Error::NotFound(format!(
                    "annotator {annotator_id} has no trace for {}",
                    set.stimulus_id()
                ))
            })?;
            let gold = leave_one_out_gold(set, annotator_id)?;
            Ok(StimulusSda {
                stimulus_id: set.stimulus_id().to_string(),
                sda: sda_signals(own, &gold, variant)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_sda = per_stimulus.iter().map(|s| s.sda).sum::<f64>() / per_stimulus.len() as f64;
    Ok(TaskReliability {
        label: ReliabilityLabel::from_score(mean_sda, threshold),
        per_stimulus,
        mean_sda,
    })
}

/// QA predictions against task-side outcomes, with "reliable" as the
/// positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// Reliable on QA and on the task.
    pub true_positive: usize,
    /// Unreliable on QA but reliable on the task.
    pub false_negative: usize,
    /// Reliable on QA but unreliable on the task.
    pub false_positive: usize,
    /// Unreliable on QA and on the task.
    pub true_negative: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.true_positive + self.false_negative + self.false_positive + self.true_negative
    }

    pub fn correct(&self) -> usize {
        self.true_positive + self.true_negative
    }

    pub fn accuracy(&self) -> f64 {
        self.correct() as f64 / self.total() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Confusion {
    pub matrix: ConfusionMatrix,
    pub accuracy: f64,
}

pub fn confusion(
    qa_labels: &BTreeMap<String, ReliabilityLabel>,
    task_labels: &BTreeMap<String, ReliabilityLabel>,
) -> Result<Confusion> {
    if !qa_labels.keys().eq(task_labels.keys()) {
        return Err(Error::InconsistentInput(
            "QA and task labels cover different annotators".into(),
        ));
    }
    if qa_labels.is_empty() {
        return Err(Error::InsufficientData("no labelled annotators".into()));
    }
    use ReliabilityLabel::{Reliable, Unreliable};
    let mut matrix = ConfusionMatrix::default();
    for (predicted, actual) in qa_labels.values().zip(task_labels.values()) {
        match (predicted, actual) {
            (Reliable, Reliable) => matrix.true_positive += 1,
            (Unreliable, Reliable) => matrix.false_negative += 1,
            (Reliable, Unreliable) => matrix.false_positive += 1,
            (Unreliable, Unreliable) => matrix.true_negative += 1,
        }
    }
    Ok(Confusion {
        accuracy: matrix.accuracy(),
        matrix,
    })
}
