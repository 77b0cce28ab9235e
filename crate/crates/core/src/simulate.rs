//! Synthetic annotators for exercising the pipeline without human subjects.
//!
//! Tracking models (diligent, lagged, noisy, inattentive, inverted) follow a
//! reference signal on its own grid. The random model scrolls a seeded random
//! walk at a fixed cadence and ignores the stimulus. The constant model never
//! scrolls.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_for;
use crate::signal::{sample_offset_ms, EventTrace, SampledSignal, TraceEvent};

/// Scroll cadence of the random-walk model.
pub const DEFAULT_EVENT_RATE_HZ: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotatorKind {
    Diligent,
    Lagged,
    Noisy,
    Inattentive,
    Inverted,
    Random,
    Constant,
}

impl AnnotatorKind {
    pub const ALL: [AnnotatorKind; 7] = [
        AnnotatorKind::Diligent,
        AnnotatorKind::Lagged,
        AnnotatorKind::Noisy,
        AnnotatorKind::Inattentive,
        AnnotatorKind::Inverted,
        AnnotatorKind::Random,
        AnnotatorKind::Constant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AnnotatorKind::Diligent => "diligent",
            AnnotatorKind::Lagged => "lagged",
            AnnotatorKind::Noisy => "noisy",
            AnnotatorKind::Inattentive => "inattentive",
            AnnotatorKind::Inverted => "inverted",
            AnnotatorKind::Random => "random",
            AnnotatorKind::Constant => "constant",
        }
    }
}

impl fmt::Display for AnnotatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AnnotatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown annotator kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorModel {
    pub kind: AnnotatorKind,
    pub lag_ms: u64,
    pub noise_sigma: f64,
    /// Probability of reacting to each change of the reference.
    pub attention: f64,
    pub event_rate_hz: f64,
    pub seed: u64,
}

impl AnnotatorModel {
    pub fn new(kind: AnnotatorKind, seed: u64) -> Self {
        Self {
            kind,
            lag_ms: 0,
            noise_sigma: 0.0,
            attention: 1.0,
            event_rate_hz: DEFAULT_EVENT_RATE_HZ,
            seed,
        }
    }

    pub fn diligent(seed: u64) -> Self {
        Self::new(AnnotatorKind::Diligent, seed)
    }

    pub fn lagged(seed: u64, lag_ms: u64) -> Self {
        Self::new(AnnotatorKind::Lagged, seed).with_lag(lag_ms)
    }

    pub fn noisy(seed: u64, noise_sigma: f64) -> Self {
        Self::new(AnnotatorKind::Noisy, seed).with_noise(noise_sigma)
    }

    pub fn inattentive(seed: u64, attention: f64) -> Self {
        Self {
            attention,
            ..Self::new(AnnotatorKind::Inattentive, seed)
        }
    }

    pub fn inverted(seed: u64) -> Self {
        Self::new(AnnotatorKind::Inverted, seed)
    }

    pub fn random(seed: u64) -> Self {
        Self::new(AnnotatorKind::Random, seed)
    }

    pub fn constant() -> Self {
        Self::new(AnnotatorKind::Constant, 0)
    }

    pub fn with_lag(mut self, lag_ms: u64) -> Self {
        self.lag_ms = lag_ms;
        self
    }

    pub fn with_noise(mut self, noise_sigma: f64) -> Self {
        self.noise_sigma = noise_sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        if !(0.0..=1.0).contains(&self.attention) {
            return Err(Error::InvalidParameter(format!(
                "attention must lie in [0, 1], got {}",
                self.attention
            )));
        }
        if !(self.event_rate_hz.is_finite() && self.event_rate_hz > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "event rate must be positive, got {}",
                self.event_rate_hz
            )));
        }
        Ok(())
    }
}

/// Simulates one annotator watching a stimulus whose ground truth is `gt`.
///
/// The random stream is keyed by the model seed and the stimulus id, so the
/// same annotator behaves differently on different stimuli but identically on
/// reruns.
pub fn simulate_annotator(
    gt: &SampledSignal,
    model: &AnnotatorModel,
    participant_id: &str,
    stimulus_id: &str,
) -> Result<EventTrace> {
    model.validate()?;
    let events = match model.kind {
        AnnotatorKind::Constant => Vec::new(),
        AnnotatorKind::Random => random_walk(gt, model, stimulus_id),
        _ => track(gt, model, stimulus_id),
    };
    EventTrace::new(participant_id, stimulus_id, events)
}

fn track(gt: &SampledSignal, model: &AnnotatorModel, stimulus_id: &str) -> Vec<TraceEvent> {
    let mut rng = rng_for(model.seed, stimulus_id);
    let noise = Normal::new(0.0, model.noise_sigma).expect("sigma validated");
    let direction = if model.kind == AnnotatorKind::Inverted {
        -1.0
    } else {
        1.0
    };
    let values = gt.values();
    let mut level = values[0];
    let mut events = Vec::with_capacity(values.len());
    for (i, &target) in values.iter().enumerate() {
        if i > 0 && target != values[i - 1] {
            if model.attention >= 1.0 {
                level = target;
            } else if rng.random::<f64>() < model.attention {
                level += target - values[i - 1];
            }
        }
        let jitter = if model.noise_sigma > 0.0 {
            noise.sample(&mut rng)
        } else {
            0.0
        };
        let t = gt.time_ms(i).max(0.0).floor() as u64 + model.lag_ms;
        events.push(TraceEvent::new(t, direction * level + jitter));
    }
    events
}

fn random_walk(gt: &SampledSignal, model: &AnnotatorModel, stimulus_id: &str) -> Vec<TraceEvent> {
    let mut rng = rng_for(model.seed, stimulus_id);
    let end_ms = gt.time_ms(gt.len() - 1) + 1000.0 / gt.sample_rate_hz();
    let mut value = 0.0;
    let mut events = Vec::new();
    for k in 0.. {
        let t = gt.start_time_ms().max(0) as f64 + sample_offset_ms(k, model.event_rate_hz);
        if t >= end_ms {
            break;
        }
        value += if rng.random::<bool>() { 1.0 } else { -1.0 };
        events.push(TraceEvent::new(t.floor() as u64 + model.lag_ms, value));
    }
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agreement::sda;
    use crate::signal::{diff_signs, minmax_normalize, prepare_trace};
    use crate::stimulus::{generate_profile, profile_to_signal, Modality, ProfileParams};

    fn gt(seed: u64, hold: f64) -> SampledSignal {
        let params = ProfileParams {
            hold_fraction: hold,
            ..ProfileParams::new("gt", Modality::Visual)
        };
        profile_to_signal(&generate_profile(seed, &params).unwrap(), 10.0).unwrap()
    }

    fn score(gt: &SampledSignal, model: &AnnotatorModel) -> f64 {
        let trace = simulate_annotator(gt, model, "p", "gt").unwrap();
        let prepared = prepare_trace(&trace, gt, 0.0).unwrap();
        sda(prepared.values(), gt.values()).unwrap()
    }

    #[test]
    fn diligent_replays_ground_truth() {
        let g = gt(1, 0.0);
        let trace = simulate_annotator(&g, &AnnotatorModel::diligent(3), "p", "gt").unwrap();
        let prepared = prepare_trace(&trace, &g, 0.0).unwrap();
        assert_eq!(prepared, minmax_normalize(&g).unwrap());
        assert_eq!(score(&g, &AnnotatorModel::diligent(3)), 1.0);
    }

    #[test]
    fn inverted_on_monotone_reference() {
        let g = SampledSignal::new(0, 10.0, (0..50).map(|i| i as f64 / 49.0).collect()).unwrap();
        assert_eq!(score(&g, &AnnotatorModel::inverted(1)), -1.0);
    }

    #[test]
    fn constant_emits_nothing() {
        let g = gt(2, 0.2);
        let trace = simulate_annotator(&g, &AnnotatorModel::constant(), "p", "gt").unwrap();
        assert!(trace.events.is_empty());
        assert_eq!(score(&g, &AnnotatorModel::constant()), 0.0);
    }

    #[test]
    fn random_model_is_near_zero_on_average() {
        let g = gt(12, 0.2);
        let mean = (0..100)
            .map(|seed| score(&g, &AnnotatorModel::random(seed)))
            .sum::<f64>()
            / 100.0;
        assert!(mean.abs() < 0.15, "mean SDA {mean}");
    }

    #[test]
    fn random_model_depends_on_seed() {
        let g = gt(4, 0.2);
        let traces: Vec<EventTrace> = (0..20)
            .map(|s| simulate_annotator(&g, &AnnotatorModel::random(s), "p", "gt").unwrap())
            .collect();
        for i in 0..traces.len() {
            for j in (i + 1)..traces.len() {
                assert_ne!(traces[i].events, traces[j].events);
            }
        }
        let again = simulate_annotator(&g, &AnnotatorModel::random(0), "p", "gt").unwrap();
        assert_eq!(again, traces[0]);
    }

    #[test]
    fn lag_only_shifts_timestamps() {
        let g = gt(5, 0.2);
        let plain = simulate_annotator(&g, &AnnotatorModel::diligent(1), "p", "gt").unwrap();
        let late = simulate_annotator(&g, &AnnotatorModel::lagged(1, 700), "p", "gt").unwrap();
        assert_eq!(plain.events.len(), late.events.len());
        for (a, b) in plain.events.iter().zip(&late.events) {
            assert_eq!(a.value, b.value);
            assert_eq!(a.timestamp_ms + 700, b.timestamp_ms);
        }
        let signs = |t: &EventTrace| {
            let values: Vec<f64> = t.events.iter().map(|e| e.value).collect();
            let s = SampledSignal::new(0, 10.0, values).unwrap();
            let mut d = diff_signs(&s).unwrap();
            d.sort();
            d
        };
        assert_eq!(signs(&plain), signs(&late));
    }

    #[test]
    fn degraded_models_still_lean_positive() {
        let g = gt(6, 0.2);
        assert!(score(&g, &AnnotatorModel::lagged(1, 500)) > 0.3);
        assert!(score(&g, &AnnotatorModel::noisy(1, 0.05)) > 0.0);
        assert!(score(&g, &AnnotatorModel::inattentive(1, 0.5)) > 0.0);
    }

    #[test]
    fn invalid_models() {
        let g = gt(1, 0.2);
        let bad = AnnotatorModel::inattentive(1, 1.5);
        assert!(simulate_annotator(&g, &bad, "p", "s").is_err());
        assert!("sleepy".parse::<AnnotatorKind>().is_err());
        assert_eq!("random".parse::<AnnotatorKind>().unwrap(), AnnotatorKind::Random);
    }
}
