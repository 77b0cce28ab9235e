//! Gold-standard signals for stimuli without an objective ground truth.
//!
//! The gold standard is the pointwise median of a group's normalized traces.
//! When an annotator is scored against it, their own trace is left out.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::SampledSignal;

/// Normalized traces of several annotators for one stimulus on a shared grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedTraceSet {
    stimulus_id: String,
    annotator_ids: Vec<String>,
    traces: Vec<SampledSignal>,
}

impl AlignedTraceSet {
    pub fn new(
        stimulus_id: impl Into<String>,
        annotator_ids: Vec<String>,
        traces: Vec<SampledSignal>,
    ) -> Result<Self> {
        if annotator_ids.len() != traces.len() {
            return Err(Error::Shape(format!(
                "{} annotator ids for {} traces",
                annotator_ids.len(),
                traces.len()
            )));
        }
        if traces.len() < 2 {
            return Err(Error::InsufficientTraces {
                needed: 2,
                got: traces.len(),
            });
        }
        let mut sorted: Vec<&String> = annotator_ids.iter().collect();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InconsistentInput(format!(
                "annotator {} appears twice",
                w[0]
            )));
        }
        if let Some(i) = traces.iter().position(|t| !t.same_grid(&traces[0])) {
            return Err(Error::Shape(format!(
                "trace of {} is on a different grid",
                annotator_ids[i]
            )));
        }
        if let Some(i) = traces
            .iter()
            .position(|t| t.values().iter().any(|v| !(0.0..=1.0).contains(v)))
        {
            return Err(Error::MalformedSignal(format!(
                "trace of {} is not normalized to [0, 1]",
                annotator_ids[i]
            )));
        }
        Ok(Self {
            stimulus_id: stimulus_id.into(),
            annotator_ids,
            traces,
        })
    }

    pub fn stimulus_id(&self) -> &str {
        &self.stimulus_id
    }

    pub fn traces(&self) -> &[SampledSignal] {
        &self.traces
    }

    pub fn position(&self, annotator_id: &str) -> Option<usize> {
        self.annotator_ids.iter().position(|a| a == annotator_id)
    }

    pub fn trace_of(&self, annotator_id: &str) -> Option<&SampledSignal> {
        self.position(annotator_id).map(|i| &self.traces[i])
    }
}

/// Read access to a set of aligned traces.
///
/// [`leave_one_out_gold`] goes through this trait so tests can verify that
/// the excluded trace is never read.
pub trait TraceSource {
    fn annotator_ids(&self) -> &[String];
    fn trace(&self, index: usize) -> &SampledSignal;
}

impl TraceSource for AlignedTraceSet {
    fn annotator_ids(&self) -> &[String] {
        &self.annotator_ids
    }

    fn trace(&self, index: usize) -> &SampledSignal {
        &self.traces[index]
    }
}

/// Pointwise median across all traces of the set.
pub fn gold_signal<S: TraceSource + ?Sized>(set: &S) -> Result<SampledSignal> {
    let count = set.annotator_ids().len();
    if count < 2 {
        return Err(Error::InsufficientTraces {
            needed: 2,
            got: count,
        });
    }
    let traces: Vec<&SampledSignal> = (0..count).map(|i| set.trace(i)).collect();
    pointwise_median(&traces)
}

/// Gold signal over every trace except `excluded`'s.
pub fn leave_one_out_gold<S: TraceSource + ?Sized>(
    set: &S,
    excluded: &str,
) -> Result<SampledSignal> {
    let ids = set.annotator_ids();
    let skip = ids
        .iter()
        .position(|a| a == excluded)
        .ok_or_else(|| Error::NotFound(format!("annotator {excluded} is not in the set")))?;
    let traces: Vec<&SampledSignal> = (0..ids.len())
        .filter(|&i| i != skip)
        .map(|i| set.trace(i))
        .collect();
    if traces.len() == 1 {
        log::warn!("leave-one-out gold for {excluded} rests on a single trace");
    }
    pointwise_median(&traces)
}

fn pointwise_median(traces: &[&SampledSignal]) -> Result<SampledSignal> {
    let first = traces.first().ok_or(Error::InsufficientTraces {
        needed: 1,
        got: 0,
    })?;
    let mut column = Vec::with_capacity(traces.len());
    let values = (0..first.len())
        .map(|t| {
            column.clear();
            column.extend(traces.iter().map(|s| s.values()[t]));
            median(&mut column)
        })
        .collect();
    first.with_values(values)
}

/// Median; the midpoint of the two central values for even counts.
pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}
