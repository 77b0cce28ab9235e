//! Study definitions and per-participant task sequencing.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};
use traceqa_core::seed::rng_for;

use crate::error::{ServiceError, ServiceResult};

pub const VISUAL_QA_INSTRUCTIONS: &str =
    "Please use the scroll-wheel to indicate the changes in the level of brightness while watching the video";
pub const AUDITORY_QA_INSTRUCTIONS: &str =
    "Please use the scroll-wheel to indicate the changes in the level of Pitch while watching the video";
pub const TASK_INSTRUCTIONS: &str =
    "Please use the scroll-wheel to indicate the changes in the level of the described affect while watching the video";

/// Profile ids of the two QA tests. The visual test always runs first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaStimuli {
    pub visual: String,
    pub auditory: String,
}

/// A subjective stimulus. `media` is an opaque URL or file id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskStimulus {
    pub stimulus_id: String,
    pub media: String,
    pub duration_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Instructions {
    pub visual_qa: String,
    pub auditory_qa: String,
    pub task: String,
}

impl Default for Instructions {
    fn default() -> Self {
        Self {
            visual_qa: VISUAL_QA_INSTRUCTIONS.into(),
            auditory_qa: AUDITORY_QA_INSTRUCTIONS.into(),
            task: TASK_INSTRUCTIONS.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyProtocol {
    pub study_id: String,
    pub qa_stimuli: QaStimuli,
    pub task_stimuli: Vec<TaskStimulus>,
    #[serde(default)]
    pub instructions: Instructions,
    #[serde(default)]
    pub affect_definition: String,
    pub randomization_seed: u64,
}

/// Ids become file names, so they are restricted to a portable alphabet.
pub fn validate_id(what: &str, id: &str) -> ServiceResult<()> {
    let ok = !id.is_empty()
        && id.len() <= 128
        && !id.starts_with('.')
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(ServiceError::Validation(format!(
            "{what} {id:?} must be 1-128 characters of [A-Za-z0-9._-] not starting with '.'"
        )))
    }
}

impl StudyProtocol {
    pub fn validate(&self) -> ServiceResult<()> {
        validate_id("study id", &self.study_id)?;
        validate_id("visual QA profile id", &self.qa_stimuli.visual)?;
        validate_id("auditory QA profile id", &self.qa_stimuli.auditory)?;
        if self.qa_stimuli.visual == self.qa_stimuli.auditory {
            return Err(ServiceError::Validation(
                "visual and auditory QA must use different profiles".into(),
            ));
        }
        if self.task_stimuli.is_empty() {
            return Err(ServiceError::Validation(
                "a study needs at least one task stimulus".into(),
            ));
        }
        let mut seen = BTreeSet::from([
            self.qa_stimuli.visual.as_str(),
            self.qa_stimuli.auditory.as_str(),
        ]);
        for task in &self.task_stimuli {
            validate_id("task stimulus id", &task.stimulus_id)?;
            if !seen.insert(&task.stimulus_id) {
                return Err(ServiceError::Validation(format!(
                    "stimulus id {} is used twice",
                    task.stimulus_id
                )));
            }
            if task.duration_ms == 0 {
                return Err(ServiceError::Validation(format!(
                    "task {} has zero duration",
                    task.stimulus_id
                )));
            }
        }
        Ok(())
    }

    /// Stimulus ids in the order `participant_id` sees them.
    pub fn sequence_for(&self, participant_id: &str) -> Vec<String> {
        let mut ids = vec![self.qa_stimuli.visual.clone(), self.qa_stimuli.auditory.clone()];
        ids.extend(
            task_order(self.randomization_seed, participant_id, self.task_stimuli.len())
                .into_iter()
                .map(|i| self.task_stimuli[i].stimulus_id.clone()),
        );
        ids
    }

    pub fn task(&self, stimulus_id: &str) -> Option<&TaskStimulus> {
        self.task_stimuli.iter().find(|t| t.stimulus_id == stimulus_id)
    }
}

/// Fisher–Yates over ChaCha8 keyed by SHA-256 of (seed, participant id).
///
/// Indices are drawn as `u64` so the order is the same on 32- and 64-bit
/// targets.
pub fn task_order(seed: u64, participant_id: &str, count: usize) -> Vec<usize> {
    let mut rng = rng_for(seed, participant_id);
    let mut order: Vec<usize> = (0..count).collect();
    for i in (1..count).rev() {
        let j = rng.random_range(0..=i as u64) as usize;
        order.swap(i, j);
    }
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    VisualQa,
    AuditoryQa,
    Task,
}

/// What a participant should annotate next.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskDescriptor {
    pub phase: Phase,
    /// Zero-based position in the participant's sequence.
    pub position: usize,
    pub total: usize,
    pub stimulus_id: String,
    /// Set for QA phases: where to fetch the `.profile.json`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_url: Option<String>,
    /// Set for task phases.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub media: Option<String>,
    pub duration_ms: u64,
    pub instructions: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub affect_definition: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NextTask {
    Pending(TaskDescriptor),
    Done,
}
