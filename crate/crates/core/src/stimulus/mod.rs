//! QA stimuli with a known ground truth.
//!
//! A [`StimulusProfile`] is a piecewise-linear control curve over `[0, 1]`.
//! The same curve drives the rendered stimulus (green intensity for the
//! visual test, oscillator pitch for the auditory test) and the ground-truth
//! signal that annotator traces are scored against.

mod audio;
mod visual;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{grid_len, sample_offset_ms, SampledSignal};

pub use audio::{render_audio, AudioClip, AUDIO_AMPLITUDE, DEFAULT_SAMPLE_RATE_HZ};
pub use visual::{render_visual, FrameSequence, VisualFrame, DEFAULT_FPS};

/// QA stimuli last one minute.
pub const DEFAULT_DURATION_MS: u64 = 60_000;
pub const DEFAULT_SEGMENT_COUNT: usize = 12;
pub const DEFAULT_HOLD_FRACTION: f64 = 0.2;

/// Fixed red channel of the visual stimulus.
pub const RED: u8 = 20;
/// Fixed blue channel of the visual stimulus.
pub const BLUE: u8 = 12;
pub const GREEN_MIN: f64 = 25.0;
pub const GREEN_MAX: f64 = 255.0;
pub const PITCH_MIN_HZ: f64 = 50.0;
pub const PITCH_MAX_HZ: f64 = 470.0;

/// Minimum level change between consecutive knots before rescaling.
const MIN_STEP: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Visual,
    Auditory,
}

impl Modality {
    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Visual => "visual",
            Modality::Auditory => "auditory",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "visual" => Ok(Modality::Visual),
            "auditory" => Ok(Modality::Auditory),
            other => Err(Error::InvalidParameter(format!(
                "unknown modality {other:?} (expected visual or auditory)"
            ))),
        }
    }
}

/// Green channel for a control level: `round(25 + 230 * level)`.
pub fn green_for_level(level: f64) -> u8 {
    (GREEN_MIN + level.clamp(0.0, 1.0) * (GREEN_MAX - GREEN_MIN)).round() as u8
}

/// Oscillator frequency for a control level: `50 + 420 * level` Hz.
pub fn frequency_for_level(level: f64) -> f64 {
    PITCH_MIN_HZ + level.clamp(0.0, 1.0) * (PITCH_MAX_HZ - PITCH_MIN_HZ)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlPoint {
    pub time_ms: u64,
    pub level: f64,
}

/// Parametric control curve for one QA stimulus.
///
/// Field order is the canonical order of the `.profile.json` document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StimulusProfile {
    pub stimulus_id: String,
    pub modality: Modality,
    pub duration_ms: u64,
    pub seed: u64,
    pub hold_fraction: f64,
    pub control_points: Vec<ControlPoint>,
}

impl StimulusProfile {
    /// Builds a profile from explicit control points, checking every invariant.
    pub fn from_points(
        stimulus_id: impl Into<String>,
        modality: Modality,
        seed: u64,
        hold_fraction: f64,
        control_points: Vec<ControlPoint>,
    ) -> Result<Self> {
        let duration_ms = control_points.last().map(|p| p.time_ms).unwrap_or(0);
        let profile = Self {
            stimulus_id: stimulus_id.into(),
            modality,
            duration_ms,
            seed,
            hold_fraction,
            control_points,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidParameter(msg));
        if self.duration_ms == 0 {
            return invalid("profile duration must be positive".into());
        }
        if !(0.0..1.0).contains(&self.hold_fraction) {
            return invalid(format!(
                "hold fraction must lie in [0, 1), got {}",
                self.hold_fraction
            ));
        }
        let points = &self.control_points;
        if points.len() < 2 {
            return invalid("profile needs at least two control points".into());
        }
        if points[0].time_ms != 0 {
            return invalid("first control point must be at 0 ms".into());
        }
        if points[points.len() - 1].time_ms != self.duration_ms {
            return invalid("last control point must be at the profile duration".into());
        }
        if let Some(w) = points.windows(2).find(|w| w[1].time_ms <= w[0].time_ms) {
            return invalid(format!(
                "control point times must increase strictly ({} ms then {} ms)",
                w[0].time_ms, w[1].time_ms
            ));
        }
        if let Some(p) = points
            .iter()
            .find(|p| !(p.level.is_finite() && (0.0..=1.0).contains(&p.level)))
        {
            return invalid(format!("level {} outside [0, 1]", p.level));
        }
        Ok(())
    }

    /// Control level at `time_ms`, linearly interpolated and clamped to the
    /// profile's time span.
    ///
    /// Evaluated as `a + (b - a) * ((t - t_a) / (t_b - t_a))` in `f64`.
    pub fn level_at(&self, time_ms: f64) -> f64 {
        let points = &self.control_points;
        let last = points[points.len() - 1];
        if time_ms <= 0.0 {
            return points[0].level;
        }
        if time_ms >= last.time_ms as f64 {
            return last.level;
        }
        // first index whose time is > t; t lies in [points[i-1], points[i])
        let i = points.partition_point(|p| (p.time_ms as f64) <= time_ms);
        let (a, b) = (points[i - 1], points[i]);
        let span = (b.time_ms - a.time_ms) as f64;
        a.level + (b.level - a.level) * ((time_ms - a.time_ms as f64) / span)
    }

    /// Canonical `.profile.json` text (pretty-printed, trailing newline).
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("profile serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let profile: Self =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("profile: {e}")))?;
        profile.validate()?;
        Ok(profile)
    }

    /// Errors unless the profile has the given modality.
    pub fn require(&self, modality: Modality) -> Result<()> {
        if self.modality == modality {
            Ok(())
        } else {
            Err(Error::ModalityMismatch {
                expected: modality.as_str(),
                got: self.modality.as_str(),
            })
        }
    }
}

/// Parameters for [`generate_profile`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileParams {
    pub stimulus_id: String,
    pub modality: Modality,
    pub duration_ms: u64,
    pub segment_count: usize,
    pub hold_fraction: f64,
}

impl ProfileParams {
    pub fn new(stimulus_id: impl Into<String>, modality: Modality) -> Self {
        Self {
            stimulus_id: stimulus_id.into(),
            modality,
            duration_ms: DEFAULT_DURATION_MS,
            segment_count: DEFAULT_SEGMENT_COUNT,
            hold_fraction: DEFAULT_HOLD_FRACTION,
        }
    }
}

/// Draws a seeded ramp-and-hold profile.
///
/// The span is cut into `segment_count` segments of random length. Each
/// segment ramps linearly to a new level and then holds it for
/// `hold_fraction` of the segment. Knot levels are drawn uniformly (at least
/// 0.15 apart from their neighbour) and then min-max rescaled so the profile
/// always reaches both 0 and 1.
pub fn generate_profile(seed: u64, params: &ProfileParams) -> Result<StimulusProfile> {
    let ProfileParams {
        stimulus_id,
        modality,
        duration_ms,
        segment_count,
        hold_fraction,
    } = params;
    let (duration_ms, segment_count, hold_fraction) =
        (*duration_ms, *segment_count, *hold_fraction);
    if segment_count < 2 {
        return Err(Error::InvalidParameter(format!(
            "segment count must be at least 2, got {segment_count}"
        )));
    }
    if duration_ms == 0 {
        return Err(Error::InvalidParameter("duration must be positive".into()));
    }
    if !(0.0..1.0).contains(&hold_fraction) {
        return Err(Error::InvalidParameter(format!(
            "hold fraction must lie in [0, 1), got {hold_fraction}"
        )));
    }
    if duration_ms < 4 * segment_count as u64 {
        return Err(Error::InvalidParameter(format!(
            "{duration_ms} ms is too short for {segment_count} segments"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut levels = Vec::with_capacity(segment_count + 1);
    levels.push(rng.random::<f64>());
    while levels.len() <= segment_count {
        let candidate = rng.random::<f64>();
        if (candidate - levels[levels.len() - 1]).abs() >= MIN_STEP {
            levels.push(candidate);
        }
    }
    let lo = levels.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = levels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for level in &mut levels {
        *level = (*level - lo) / (hi - lo);
    }

    let weights: Vec<f64> = (0..segment_count)
        .map(|_| rng.random_range(0.5..1.5))
        .collect();
    let total: f64 = weights.iter().sum();
    let mut boundaries = Vec::with_capacity(segment_count + 1);
    boundaries.push(0u64);
    let mut acc = 0.0;
    for (k, w) in weights.iter().enumerate() {
        acc += w;
        let b = if k + 1 == segment_count {
            duration_ms
        } else {
            (acc / total * duration_ms as f64).round() as u64
        };
        // keep every segment at least 2 ms long so ramp and hold both fit
        let min_b = boundaries[k] + 2;
        let max_b = duration_ms - 2 * (segment_count - k - 1) as u64;
        boundaries.push(b.clamp(min_b, max_b));
    }

    let mut points = vec![ControlPoint {
        time_ms: 0,
        level: levels[0],
    }];
    for k in 0..segment_count {
        let (start, end) = (boundaries[k], boundaries[k + 1]);
        let span = (end - start) as f64;
        let ramp_end = (start + ((1.0 - hold_fraction) * span).round() as u64)
            .clamp(start + 1, end);
        let level = levels[k + 1];
        points.push(ControlPoint {
            time_ms: ramp_end,
            level,
        });
        if ramp_end < end {
            points.push(ControlPoint { time_ms: end, level });
        }
    }

    StimulusProfile::from_points(stimulus_id.clone(), *modality, seed, hold_fraction, points)
}

/// Evaluates the control curve on a uniform grid starting at 0 ms. This is
/// the objective ground truth for QA scoring.
pub fn profile_to_signal(profile: &StimulusProfile, rate_hz: f64) -> Result<SampledSignal> {
    profile.validate()?;
    if !(rate_hz.is_finite() && rate_hz > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rate must be positive, got {rate_hz}"
        )));
    }
    let len = grid_len(profile.duration_ms, rate_hz);
    if len == 0 {
        return Err(Error::InvalidParameter(format!(
            "{} ms at {rate_hz} Hz yields no samples",
            profile.duration_ms
        )));
    }
    let values = (0..len)
        .map(|i| profile.level_at(sample_offset_ms(i, rate_hz)))
        .collect();
    SampledSignal::new(0, rate_hz, values)
}

/// `time_ms,level` CSV for a ground-truth or gold signal.
pub fn signal_to_csv(signal: &SampledSignal) -> String {
    let mut out = String::from("time_ms,level\n");
    for (i, v) in signal.values().iter().enumerate() {
        out.push_str(&format!("{},{}\n", signal.time_ms(i), v));
    }
    out
}

/// Parses a `time_ms,level` CSV. The rate is inferred from the first two
/// timestamps, and the grid must be uniform.
pub fn signal_from_csv(text: &str) -> Result<SampledSignal> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next().map(str::trim) {
        Some("time_ms,level") => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header `time_ms,level`, got {other:?}"
            )))
        }
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (n, line) in lines.enumerate() {
        let (t, v) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("row {}: expected two columns", n + 2)))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", n + 2)))
        };
        times.push(parse(t)?);
        values.push(parse(v)?);
    }
    if times.len() < 2 {
        return Err(Error::InsufficientData(
            "ground truth needs at least two rows".into(),
        ));
    }
    let period = times[1] - times[0];
    if period <= 0.0 {
        return Err(Error::MalformedSignal("timestamps must increase".into()));
    }
    let rate_hz = 1000.0 / period;
    for (i, t) in times.iter().enumerate() {
        let expected = times[0] + sample_offset_ms(i, rate_hz);
        if (t - expected).abs() > 1e-6 * expected.abs().max(1.0) {
            return Err(Error::MalformedSignal(format!(
                "row {} is off the uniform grid ({t} ms, expected {expected} ms)",
                i + 2
            )));
        }
    }
    SampledSignal::new(times[0].round() as i64, rate_hz, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(segments: usize, hold: f64) -> ProfileParams {
        ProfileParams {
            segment_count: segments,
            hold_fraction: hold,
            ..ProfileParams::new("qa-visual", Modality::Visual)
        }
    }

    fn linear(points: &[(u64, f64)]) -> StimulusProfile {
        StimulusProfile::from_points(
            "test",
            Modality::Visual,
            0,
            0.0,
            points
                .iter()
                .map(|&(time_ms, level)| ControlPoint { time_ms, level })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_profile(7, &params(12, 0.2)).unwrap();
        let b = generate_profile(7, &params(12, 0.2)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn generated_profile_spans_full_range() {
        for seed in 0..50 {
            let p = generate_profile(seed, &params(12, 0.2)).unwrap();
            p.validate().unwrap();
            let levels: Vec<f64> = p.control_points.iter().map(|c| c.level).collect();
            assert!(levels.iter().all(|l| (0.0..=1.0).contains(l)));
            assert!(levels.contains(&0.0));
            assert!(levels.contains(&1.0));
            assert_eq!(p.duration_ms, 60_000);
            assert_eq!(p.control_points.last().unwrap().time_ms, 60_000);
        }
    }

    #[test]
    fn neighbouring_seeds_differ() {
        let mut collisions = 0;
        for seed in 0..100u64 {
            let a = generate_profile(seed, &params(12, 0.2)).unwrap();
            let b = generate_profile(seed + 1, &params(12, 0.2)).unwrap();
            if a.control_points == b.control_points {
                collisions += 1;
            }
        }
        assert_eq!(collisions, 0, "{collisions} of 100 seed pairs collided");
    }

    #[test]
    fn generation_rejects_bad_parameters() {
        let err = generate_profile(1, &params(1, 0.2)).unwrap_err();
        assert_eq!(err.kind(), "invalid_parameter");
        assert!(generate_profile(1, &params(4, 1.0)).is_err());
        let mut p = params(4, 0.2);
        p.duration_ms = 0;
        assert!(generate_profile(1, &p).is_err());
    }

    #[test]
    fn hold_free_profiles_have_no_flat_segments() {
        let p = generate_profile(3, &params(6, 0.0)).unwrap();
        assert_eq!(p.control_points.len(), 7);
        for w in p.control_points.windows(2) {
            assert_ne!(w[0].level, w[1].level);
        }
    }

    #[test]
    fn linear_ramp_signal() {
        let p = linear(&[(0, 0.0), (60_000, 1.0)]);
        let s = profile_to_signal(&p, 1.0).unwrap();
        assert_eq!(s.len(), 60);
        for (i, v) in s.values().iter().enumerate() {
            assert!((v - i as f64 / 60.0).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_profile_signal() {
        let p = linear(&[(0, 0.3), (60_000, 0.3)]);
        let s = profile_to_signal(&p, 10.0).unwrap();
        assert!(s.values().iter().all(|&v| v == 0.3));
    }

    #[test]
    fn triangle_profile_is_symmetric() {
        let p = linear(&[(0, 0.0), (30_000, 1.0), (60_000, 0.0)]);
        let s = profile_to_signal(&p, 2.0).unwrap();
        let v = s.values();
        assert_eq!(v.len(), 120);
        assert_eq!(v[60], 1.0);
        for k in 1..60 {
            assert!((v[60 - k] - v[60 + k]).abs() < 1e-12);
        }
        assert!(v[..60].windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn modality_map_endpoints() {
        assert_eq!(green_for_level(0.0), 25);
        assert_eq!(green_for_level(1.0), 255);
        assert_eq!(green_for_level(0.5), 140);
        assert_eq!(frequency_for_level(0.0), 50.0);
        assert_eq!(frequency_for_level(1.0), 470.0);
        assert_eq!(frequency_for_level(0.5), 260.0);
    }

    #[test]
    fn profile_json_round_trips_exactly() {
        let p = generate_profile(11, &params(12, 0.2)).unwrap();
        let text = p.to_json();
        let back = StimulusProfile::from_json(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_json(), text);
        let keys: Vec<usize> = [
            "stimulus_id",
            "modality",
            "duration_ms",
            "seed",
            "hold_fraction",
            "control_points",
        ]
        .iter()
        .map(|k| text.find(&format!("\"{k}\"")).unwrap())
        .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn invalid_profiles_are_rejected() {
        let bad = StimulusProfile::from_points(
            "x",
            Modality::Visual,
            0,
            0.0,
            vec![
                ControlPoint { time_ms: 0, level: 0.0 },
                ControlPoint { time_ms: 10, level: 1.5 },
            ],
        );
        assert!(bad.is_err());
        let bad = StimulusProfile::from_points(
            "x",
            Modality::Visual,
            0,
            0.0,
            vec![
                ControlPoint { time_ms: 5, level: 0.0 },
                ControlPoint { time_ms: 10, level: 1.0 },
            ],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn ground_truth_csv_round_trip() {
        let p = generate_profile(5, &params(4, 0.2)).unwrap();
        let s = profile_to_signal(&p, 10.0).unwrap();
        let csv = signal_to_csv(&s);
        assert!(csv.starts_with("time_ms,level\n0,"));
        assert_eq!(signal_from_csv(&csv).unwrap(), s);
    }

    #[test]
    fn modality_parsing() {
        assert_eq!("visual".parse::<Modality>().unwrap(), Modality::Visual);
        assert!("smell".parse::<Modality>().is_err());
    }
}
