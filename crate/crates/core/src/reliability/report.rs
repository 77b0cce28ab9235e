use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    classify, confusion, score_qa, task_reliability, Confusion, QaScore, ReliabilityLabel,
    ScoringConfig,
};
use crate::agreement::{
    cohens_kappa, cronbach_alpha, krippendorff_alpha, mean_ci, pearson, sda_signals, t_test,
    MeanCi, MeasurementLevel, RatingsMatrix, SdaVariant, TTest,
};
use crate::error::{Error, Result};
use crate::gold::AlignedTraceSet;
use crate::signal::{diff_signs, prepare_trace, resample, minmax_normalize, EventTrace, SampledSignal};

/// Everything one annotator submitted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotatorRecord {
    pub annotator_id: String,
    pub visual: Option<EventTrace>,
    pub auditory: Option<EventTrace>,
    /// Subjective-task traces by stimulus id.
    pub tasks: BTreeMap<String, EventTrace>,
}

/// Inputs of a reliability report.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyData {
    /// Visual QA ground truth, sampled at the analysis rate.
    pub visual_gt: SampledSignal,
    /// Auditory QA ground truth, sampled at the analysis rate.
    pub auditory_gt: SampledSignal,
    /// Duration of every subjective stimulus.
    pub task_durations: BTreeMap<String, u64>,
    /// Annotators by group name. Gold standards never mix groups.
    pub groups: BTreeMap<String, Vec<AnnotatorRecord>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StimulusSda {
    pub stimulus_id: String,
    pub sda: f64,
}

/// Settings and conventions the report was computed with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSettings {
    pub rate_hz: f64,
    pub sda_variant: SdaVariant,
    pub threshold: f64,
    pub initial_value: f64,
    pub resampling: String,
    pub normalization: String,
    pub qa_reference: String,
    pub task_reference: String,
    pub kappa_categories: String,
    pub krippendorff_level: MeasurementLevel,
    pub confidence_interval: String,
    pub positive_class: String,
}

impl ReportSettings {
    fn from_config(config: &ScoringConfig) -> Self {
        Self {
            rate_hz: config.rate_hz,
            sda_variant: config.sda_variant,
            threshold: config.threshold,
            initial_value: config.initial_value,
            resampling: "sample-and-hold".into(),
            normalization: "min-max per trace; flat traces map to 0.5".into(),
            qa_reference: "each annotator vs the stimulus ground truth".into(),
            task_reference: "each annotator vs the median of the other annotators in their group"
                .into(),
            kappa_categories: "signs of successive differences (-1, 0, +1)".into(),
            krippendorff_level: MeasurementLevel::Interval,
            confidence_interval: "mean +/- 1.96 sd / sqrt(n)".into(),
            positive_class: "reliable".into(),
        }
    }
}

/// Group-level metrics on one QA test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaTestMetrics {
    pub annotators: usize,
    pub sda: MeanCi,
    pub kappa: MeanCi,
    pub cronbach_alpha: Option<f64>,
    pub krippendorff_alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSummary {
    pub stimuli: usize,
    pub sda: MeanCi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub name: String,
    pub annotators: usize,
    pub visual: Option<QaTestMetrics>,
    pub auditory: Option<QaTestMetrics>,
    /// Pearson correlation of visual and auditory QA SDA across annotators.
    pub qa_sda_correlation: Option<f64>,
    pub task: Option<TaskSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorReport {
    pub annotator_id: String,
    pub group: String,
    pub qa: Option<QaScore>,
    pub qa_label: Option<ReliabilityLabel>,
    pub task_sda: Vec<StimulusSda>,
    pub mean_task_sda: Option<f64>,
    pub task_label: Option<ReliabilityLabel>,
}

/// t-test between the task SDA distributions of two groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupComparison {
    pub group_a: String,
    pub group_b: String,
    pub paired: bool,
    pub test: Option<TTest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    pub settings: ReportSettings,
    /// Ordered by mean task SDA, highest first; groups without task data last.
    pub groups: Vec<GroupReport>,
    /// Ordered by annotator id.
    pub annotators: Vec<AnnotatorReport>,
    pub comparisons: Vec<GroupComparison>,
    pub confusion: Option<Confusion>,
    pub warnings: Vec<String>,
}

/// Builds the full reliability report for a study.
pub fn group_report(study: &StudyData, config: &ScoringConfig) -> Result<ReliabilityReport> {
    if study.groups.is_empty() {
        return Err(Error::InsufficientData("no annotator groups".into()));
    }
    for gt in [&study.visual_gt, &study.auditory_gt] {
        if gt.sample_rate_hz() != config.rate_hz {
            return Err(Error::Shape(format!(
                "ground truth sampled at {} Hz, analysis rate is {} Hz",
                gt.sample_rate_hz(),
                config.rate_hz
            )));
        }
    }
    let any_qa = study
        .groups
        .values()
        .flatten()
        .any(|a| a.visual.is_some() && a.auditory.is_some());
    if !any_qa {
        return Err(Error::InsufficientData(
            "no annotator completed both QA tests".into(),
        ));
    }

    let mut warnings = Vec::new();
    let mut groups = Vec::new();
    let mut annotators = Vec::new();
    let mut task_values: BTreeMap<&str, Vec<(String, String, f64)>> = BTreeMap::new();

    for (name, members) in &study.groups {
        let mut ids: Vec<&str> = members.iter().map(|a| a.annotator_id.as_str()).collect();
        ids.sort();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InconsistentInput(format!(
                "annotator {} listed twice in group {name}",
                w[0]
            )));
        }
        if members.len() < 2 {
            warnings.push(format!(
                "group {name} has a single annotator; group metrics omitted"
            ));
        }

        let sets = task_sets(study, members, config)?;
        for set in &sets {
            if set.traces().len() == 2 {
                warnings.push(format!(
                    "group {name}, stimulus {}: leave-one-out gold rests on one trace",
                    set.stimulus_id()
                ));
            }
        }

        let mut qa_scores = Vec::new();
        let mut group_task = Vec::new();
        for member in members {
            let id = member.annotator_id.as_str();
            let qa = match score_qa(
                id,
                member.visual.as_ref(),
                member.auditory.as_ref(),
                &study.visual_gt,
                &study.auditory_gt,
                config,
            ) {
                Ok(score) => Some(score),
                Err(Error::IncompleteQa(_)) => {
                    warnings.push(format!("annotator {id} has incomplete QA data"));
                    None
                }
                Err(e) => return Err(e),
            };
            let own_sets: Vec<AlignedTraceSet> = sets
                .iter()
                .filter(|s| s.position(id).is_some())
                .cloned()
                .collect();
            let task = if own_sets.is_empty() {
                None
            } else {
                Some(task_reliability(
                    id,
                    &own_sets,
                    config.sda_variant,
                    config.threshold,
                )?)
            };
            if let Some(t) = &task {
                group_task.extend(
                    t.per_stimulus
                        .iter()
                        .map(|s| (s.stimulus_id.clone(), id.to_string(), s.sda)),
                );
            }
            if let Some(q) = &qa {
                qa_scores.push(q.clone());
            }
            annotators.push(AnnotatorReport {
                annotator_id: id.to_string(),
                group: name.clone(),
                qa_label: qa.as_ref().map(|q| classify(q, config.threshold)),
                qa,
                mean_task_sda: task.as_ref().map(|t| t.mean_sda),
                task_label: task.as_ref().map(|t| t.label),
                task_sda: task.map(|t| t.per_stimulus).unwrap_or_default(),
            });
        }

        let visual = qa_metrics(
            name,
            "visual",
            members.iter().filter_map(|m| m.visual.as_ref()),
            &study.visual_gt,
            config,
            members.len() >= 2,
            &mut warnings,
        )?;
        let auditory = qa_metrics(
            name,
            "auditory",
            members.iter().filter_map(|m| m.auditory.as_ref()),
            &study.auditory_gt,
            config,
            members.len() >= 2,
            &mut warnings,
        )?;
        let qa_sda_correlation = if qa_scores.len() >= 2 {
            let v: Vec<f64> = qa_scores.iter().map(|q| q.sda_visual).collect();
            let a: Vec<f64> = qa_scores.iter().map(|q| q.sda_auditory).collect();
            match pearson(&v, &a) {
                Ok(r) => Some(r),
                Err(e) => {
                    warnings.push(format!("group {name}: QA SDA correlation: {e}"));
                    None
                }
            }
        } else {
            None
        };
        group_task.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        let task = if group_task.is_empty() {
            None
        } else {
            let values: Vec<f64> = group_task.iter().map(|v| v.2).collect();
            Some(TaskSummary {
                stimuli: sets.len(),
                sda: mean_ci(&values)?,
            })
        };
        task_values.insert(name.as_str(), group_task);
        groups.push(GroupReport {
            name: name.clone(),
            annotators: members.len(),
            visual,
            auditory,
            qa_sda_correlation,
            task,
        });
    }

    let comparisons = compare_groups(&task_values, &mut warnings);

    groups.sort_by(|a, b| {
        let key = |g: &GroupReport| g.task.as_ref().map(|t| t.sda.mean);
        match (key(a), key(b)) {
            (Some(x), Some(y)) => y.total_cmp(&x).then_with(|| a.name.cmp(&b.name)),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => a.name.cmp(&b.name),
        }
    });
    annotators.sort_by(|a, b| a.annotator_id.cmp(&b.annotator_id).then(a.group.cmp(&b.group)));

    let mut qa_labels = BTreeMap::new();
    let mut task_labels = BTreeMap::new();
    for a in &annotators {
        if let (Some(p), Some(t)) = (a.qa_label, a.task_label) {
            let key = format!("{}/{}", a.group, a.annotator_id);
            qa_labels.insert(key.clone(), p);
            task_labels.insert(key, t);
        }
    }
    let confusion = if qa_labels.is_empty() {
        None
    } else {
        Some(confusion(&qa_labels, &task_labels)?)
    };

    Ok(ReliabilityReport {
        settings: ReportSettings::from_config(config),
        groups,
        annotators,
        comparisons,
        confusion,
        warnings,
    })
}

/// Aligned, normalized traces per subjective stimulus for one group.
fn task_sets(
    study: &StudyData,
    members: &[AnnotatorRecord],
    config: &ScoringConfig,
) -> Result<Vec<AlignedTraceSet>> {
    let mut sets = Vec::new();
    for (stimulus, &duration_ms) in &study.task_durations {
        let mut ids = Vec::new();
        let mut traces = Vec::new();
        for member in members {
            if let Some(trace) = member.tasks.get(stimulus) {
                let sampled = resample(trace, config.rate_hz, duration_ms, config.initial_value)?;
                ids.push(member.annotator_id.clone());
                traces.push(minmax_normalize(&sampled)?);
            }
        }
        if traces.len() >= 2 {
            sets.push(AlignedTraceSet::new(stimulus.clone(), ids, traces)?);
        }
    }
    Ok(sets)
}

fn qa_metrics<'a>(
    group: &str,
    test: &str,
    traces: impl Iterator<Item = &'a EventTrace>,
    gt: &SampledSignal,
    config: &ScoringConfig,
    group_metrics: bool,
    warnings: &mut Vec<String>,
) -> Result<Option<QaTestMetrics>> {
    let prepared = traces
        .map(|t| prepare_trace(t, gt, config.initial_value))
        .collect::<Result<Vec<_>>>()?;
    if prepared.is_empty() {
        return Ok(None);
    }
    let gt_signs = diff_signs(gt)?;
    let mut sdas = Vec::with_capacity(prepared.len());
    let mut kappas = Vec::with_capacity(prepared.len());
    for p in &prepared {
        sdas.push(sda_signals(p, gt, config.sda_variant)?);
        kappas.push(cohens_kappa(&diff_signs(p)?, &gt_signs)?);
    }
    let (mut cronbach, mut krippendorff) = (None, None);
    if group_metrics && prepared.len() >= 2 {
        let matrix = RatingsMatrix::complete(prepared.iter().map(|p| p.values().to_vec()).collect())?;
        match cronbach_alpha(&matrix) {
            Ok(a) => cronbach = Some(a),
            Err(e) => warnings.push(format!("group {group}, {test} QA: Cronbach's alpha: {e}")),
        }
        match krippendorff_alpha(&matrix, MeasurementLevel::Interval) {
            Ok(a) => krippendorff = Some(a),
            Err(e) => warnings.push(format!("group {group}, {test} QA: Krippendorff's alpha: {e}")),
        }
    }
    Ok(Some(QaTestMetrics {
        annotators: prepared.len(),
        sda: mean_ci(&sdas)?,
        kappa: mean_ci(&kappas)?,
        cronbach_alpha: cronbach,
        krippendorff_alpha: krippendorff,
    }))
}

/// Pairwise t-tests on task SDA. Values are ordered by (stimulus, annotator);
/// equally sized groups are paired in that order, others use Welch's test.
fn compare_groups(
    task_values: &BTreeMap<&str, Vec<(String, String, f64)>>,
    warnings: &mut Vec<String>,
) -> Vec<GroupComparison> {
    let names: Vec<&str> = task_values
        .iter()
        .filter(|(_, v)| !v.is_empty())
        .map(|(k, _)| *k)
        .collect();
    let mut out = Vec::new();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            let xa: Vec<f64> = task_values[a].iter().map(|v| v.2).collect();
            let xb: Vec<f64> = task_values[b].iter().map(|v| v.2).collect();
            let paired = xa.len() == xb.len();
            let test = match t_test(&xa, &xb, paired) {
                Ok(t) => Some(t),
                Err(e) => {
                    warnings.push(format!("t-test {a} vs {b}: {e}"));
                    None
                }
            };
            out.push(GroupComparison {
                group_a: a.to_string(),
                group_b: b.to_string(),
                paired,
                test,
            });
        }
    }
    out
}
