//! Uniformly sampled signals and raw scroll-event traces.
//!
//! Annotation traces arrive as unbounded, event-timestamped values. Every
//! metric in this crate operates on [`SampledSignal`]s, so traces are first
//! put on a uniform grid with sample-and-hold semantics ([`resample`]) and
//! then rescaled to `[0, 1]` ([`minmax_normalize`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Analysis grid used when nothing else is configured.
pub const DEFAULT_RATE_HZ: f64 = 10.0;

/// Trace value before the annotator's first scroll event.
pub const DEFAULT_INITIAL_VALUE: f64 = 0.0;

/// Direction of change between consecutive samples: -1, 0 or +1.
pub type Sign = i8;

/// A scalar time series on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSignal {
    start_time_ms: i64,
    sample_rate_hz: f64,
    values: Vec<f64>,
}

impl SampledSignal {
    pub fn new(start_time_ms: i64, sample_rate_hz: f64, values: Vec<f64>) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::MalformedSignal(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if values.is_empty() {
            return Err(Error::MalformedSignal("signal has no samples".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::MalformedSignal(format!(
                "sample {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(Self {
            start_time_ms,
            sample_rate_hz,
            values,
        })
    }

    pub fn start_time_ms(&self) -> i64 {
        self.start_time_ms
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time of sample `index` in milliseconds.
    pub fn time_ms(&self, index: usize) -> f64 {
        self.start_time_ms as f64 + sample_offset_ms(index, self.sample_rate_hz)
    }

    /// Same grid, different values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::Shape(format!(
                "expected {} samples, got {}",
                self.values.len(),
                values.len()
            )));
        }
        Self::new(self.start_time_ms, self.sample_rate_hz, values)
    }

    pub fn same_grid(&self, other: &SampledSignal) -> bool {
        self.start_time_ms == other.start_time_ms
            && self.sample_rate_hz == other.sample_rate_hz
            && self.values.len() == other.values.len()
    }

    /// Reinterprets the samples as scroll events, one per grid point.
    ///
    /// Timestamps are floored to whole milliseconds, so resampling the result
    /// at the same rate reproduces this signal for any rate up to 1 kHz.
    pub fn to_event_trace(&self, participant_id: &str, stimulus_id: &str) -> EventTrace {
        let events = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &value)| TraceEvent {
                timestamp_ms: self.time_ms(i).max(0.0).floor() as u64,
                value,
            })
            .collect();
        EventTrace {
            participant_id: participant_id.to_string(),
            stimulus_id: stimulus_id.to_string(),
            events,
        }
    }
}

/// Offset of sample `index` from the start of the grid.
///
/// Evaluated as `(index * 1000) / rate` so integer-period grids land on exact
/// millisecond values.
pub(crate) fn sample_offset_ms(index: usize, rate_hz: f64) -> f64 {
    (index as f64 * 1000.0) / rate_hz
}

/// Number of grid points covering `duration_ms` at `rate_hz`.
pub fn grid_len(duration_ms: u64, rate_hz: f64) -> usize {
    (duration_ms as f64 * rate_hz / 1000.0).floor() as usize
}

/// One scroll event: the annotator's running value at a media time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub timestamp_ms: u64,
    pub value: f64,
}

impl TraceEvent {
    pub fn new(timestamp_ms: u64, value: f64) -> Self {
        Self {
            timestamp_ms,
            value,
        }
    }
}

/// Raw annotation input for one participant and one stimulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventTrace {
    pub participant_id: String,
    pub stimulus_id: String,
    pub events: Vec<TraceEvent>,
}

impl EventTrace {
    pub fn new(
        participant_id: impl Into<String>,
        stimulus_id: impl Into<String>,
        events: Vec<TraceEvent>,
    ) -> Result<Self> {
        let trace = Self {
            participant_id: participant_id.into(),
            stimulus_id: stimulus_id.into(),
            events,
        };
        trace.validate()?;
        Ok(trace)
    }

    /// Checks that timestamps never go backwards and values are finite.
    pub fn validate(&self) -> Result<()> {
        validate_events(&self.events)
    }
}

pub fn validate_events(events: &[TraceEvent]) -> Result<()> {
    for (i, event) in events.iter().enumerate() {
        if !event.value.is_finite() {
            return Err(Error::MalformedTrace(format!(
                "event {i} has non-finite value {}",
                event.value
            )));
        }
        if i > 0 && event.timestamp_ms < events[i - 1].timestamp_ms {
            return Err(Error::MalformedTrace(format!(
                "event {i} at {} ms precedes event {} at {} ms",
                event.timestamp_ms,
                i - 1,
                events[i - 1].timestamp_ms
            )));
        }
    }
    Ok(())
}

/// Puts an event trace on a uniform grid starting at 0 ms.
///
/// Sample `i` holds the value of the latest event at or before its grid time,
/// or `initial_value` if no event has happened yet. Events past the end of the
/// grid are ignored.
pub fn resample(
    trace: &EventTrace,
    rate_hz: f64,
    duration_ms: u64,
    initial_value: f64,
) -> Result<SampledSignal> {
    if !(rate_hz.is_finite() && rate_hz > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rate must be positive, got {rate_hz}"
        )));
    }
    if duration_ms == 0 {
        return Err(Error::InvalidParameter("duration must be positive".into()));
    }
    let len = grid_len(duration_ms, rate_hz);
    if len == 0 {
        return Err(Error::InvalidParameter(format!(
            "{duration_ms} ms at {rate_hz} Hz yields no samples"
        )));
    }
    hold_on_grid(&trace.events, 0, rate_hz, len, initial_value)
}

/// Resamples `trace` onto exactly the grid of `reference`.
pub fn resample_onto(
    trace: &EventTrace,
    reference: &SampledSignal,
    initial_value: f64,
) -> Result<SampledSignal> {
    hold_on_grid(
        &trace.events,
        reference.start_time_ms(),
        reference.sample_rate_hz(),
        reference.len(),
        initial_value,
    )
}

fn hold_on_grid(
    events: &[TraceEvent],
    start_time_ms: i64,
    rate_hz: f64,
    len: usize,
    initial_value: f64,
) -> Result<SampledSignal> {
    validate_events(events)?;
    if !initial_value.is_finite() {
        return Err(Error::InvalidParameter(
            "initial value must be finite".into(),
        ));
    }
    let mut values = Vec::with_capacity(len);
    let mut current = initial_value;
    let mut next = 0;
    for i in 0..len {
        let t = start_time_ms as f64 + sample_offset_ms(i, rate_hz);
        while next < events.len() && events[next].timestamp_ms as f64 <= t {
            current = events[next].value;
            next += 1;
        }
        values.push(current);
    }
    SampledSignal::new(start_time_ms, rate_hz, values)
}

/// Rescales a signal to `[0, 1]`. A flat signal maps to a constant 0.5.
pub fn minmax_normalize(signal: &SampledSignal) -> Result<SampledSignal> {
    let values = signal.values();
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::MalformedSignal(format!("non-finite sample {v}")));
    }
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = max - min;
    let normalized = if range > 0.0 {
        values.iter().map(|v| (v - min) / range).collect()
    } else {
        vec![0.5; values.len()]
    };
    signal.with_values(normalized)
}

/// Sign of each successive difference, `sign(0) = 0`.
pub fn diff_signs(signal: &SampledSignal) -> Result<Vec<Sign>> {
    diff_signs_of(signal.values())
}

pub fn diff_signs_of(values: &[f64]) -> Result<Vec<Sign>> {
    if values.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: values.len(),
        });
    }
    Ok(values.windows(2).map(|w| sign(w[1] - w[0])).collect())
}

pub(crate) fn sign(x: f64) -> Sign {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Resample and normalize in one step, the form every metric consumes.
pub fn prepare_trace(
    trace: &EventTrace,
    reference: &SampledSignal,
    initial_value: f64,
) -> Result<SampledSignal> {
    minmax_normalize(&resample_onto(trace, reference, initial_value)?)
}
