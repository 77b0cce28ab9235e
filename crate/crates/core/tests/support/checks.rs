//! Whole-criterion checks over the library, each returning a failure
//! description. Used by the core integration tests and the acceptance suite.

#![allow(dead_code)]

use std::sync::Mutex;

use rand::Rng;
use traceqa_core::agreement::{
    cohens_kappa, cronbach_alpha, krippendorff_alpha, sda, t_test, MeasurementLevel,
    RatingsMatrix,
};
use traceqa_core::gold::{gold_signal, leave_one_out_gold, AlignedTraceSet, TraceSource};
use traceqa_core::signal::{diff_signs_of, SampledSignal};
use traceqa_core::stimulus::{
    generate_profile, profile_to_signal, render_audio, render_visual, FrameSequence, Modality,
    ProfileParams, StimulusProfile,
};

use super::*;

pub type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn krippendorff_matches_oracle(cases: usize, tol: f64) -> Check {
    let mut rng = rng(0x6b72_6970);
    let levels = [
        (MeasurementLevel::Nominal, Level::Nominal),
        (MeasurementLevel::Ordinal, Level::Ordinal),
        (MeasurementLevel::Interval, Level::Interval),
    ];
    let mut compared = 0;
    let mut worst = 0.0f64;
    for case in 0..cases {
        let raters = rng.random_range(2..=5);
        let items = rng.random_range(2..=20);
        let integer = case % 2 == 0;
        let rows = random_rows(&mut rng, raters, items, 0.1, integer);
        let Ok(matrix) = RatingsMatrix::new(rows.clone()) else {
            continue;
        };
        for (level, oracle_level) in levels {
            if !integer && level != MeasurementLevel::Interval {
                continue;
            }
            let got = krippendorff_alpha(&matrix, level).ok();
            let want = krippendorff_oracle(&rows, oracle_level);
            match (got, want) {
                (Some(g), Some(w)) => {
                    worst = worst.max((g - w).abs());
                    ensure((g - w).abs() <= tol, || {
                        format!("case {case} {level}: alpha {g} vs oracle {w}")
                    })?;
                    compared += 1;
                }
                (None, None) => {}
                (g, w) => return Err(format!("case {case} {level}: {g:?} vs oracle {w:?}")),
            }
        }
    }
    ensure(compared >= cases, || format!("only {compared} comparisons"))?;
    Ok(format!("{compared} comparisons, max |diff| {worst:.1e}"))
}

pub fn kappa_matches_oracle(cases: usize, tol: f64) -> Check {
    let mut rng = rng(0x6b61_7070);
    let mut worst = 0.0f64;
    for case in 0..cases {
        let n = rng.random_range(1..=60);
        let a: Vec<i8> = (0..n).map(|_| rng.random_range(-1..=1)).collect();
        let b: Vec<i8> = if case % 5 == 0 {
            a.clone()
        } else {
            (0..n).map(|_| rng.random_range(-1..=1)).collect()
        };
        let got = cohens_kappa(&a, &b).map_err(|e| format!("case {case}: {e}"))?;
        let want = kappa_oracle(&a, &b);
        worst = worst.max((got - want).abs());
        ensure((got - want).abs() <= tol, || {
            format!("case {case}: kappa {got} vs oracle {want}")
        })?;
    }
    Ok(format!("{cases} cases, max |diff| {worst:.1e}"))
}

pub fn cronbach_matches_oracle(cases: usize, tol: f64) -> Check {
    let mut rng = rng(0x6372_6f6e);
    let mut worst = 0.0f64;
    let mut compared = 0;
    for case in 0..cases {
        let raters = rng.random_range(2..=6);
        let items = rng.random_range(2..=30);
        let base: Vec<f64> = (0..items).map(|_| rng.random_range(-1.0..1.0)).collect();
        let rows: Vec<Vec<f64>> = (0..raters)
            .map(|_| {
                let w = rng.random_range(0.0..1.0);
                base.iter()
                    .map(|b| w * b + (1.0 - w) * rng.random_range(-1.0..1.0))
                    .collect()
            })
            .collect();
        let matrix = RatingsMatrix::complete(rows.clone()).map_err(|e| e.to_string())?;
        match (cronbach_alpha(&matrix).ok(), cronbach_oracle(&rows)) {
            (Some(g), Some(w)) => {
                worst = worst.max((g - w).abs());
                ensure((g - w).abs() <= tol, || {
                    format!("case {case}: alpha {g} vs oracle {w}")
                })?;
                compared += 1;
            }
            (None, None) => {}
            (g, w) => return Err(format!("case {case}: {g:?} vs oracle {w:?}")),
        }
    }
    Ok(format!("{compared} cases, max |diff| {worst:.1e}"))
}

pub fn t_test_matches_quadrature(cases: usize, tol: f64) -> Check {
    let mut rng = rng(0x7474_6573);
    let mut worst = 0.0f64;
    for case in 0..cases {
        let paired = case % 2 == 0;
        let na = 30;
        let nb = if paired { 30 } else { rng.random_range(10..40) };
        let shift = rng.random_range(-0.8..0.8);
        let a: Vec<f64> = (0..na).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..nb)
            .map(|_| shift + rng.random_range(-1.5..1.5))
            .collect();
        let got = t_test(&a, &b, paired).map_err(|e| format!("case {case}: {e}"))?;
        let (t, df, p) = t_test_oracle(&a, &b, paired);
        ensure((got.t - t).abs() <= 1e-9 * t.abs().max(1.0), || {
            format!("case {case}: t {} vs {t}", got.t)
        })?;
        ensure((got.df - df).abs() <= 1e-9 * df, || {
            format!("case {case}: df {} vs {df}", got.df)
        })?;
        worst = worst.max((got.p - p).abs());
        ensure((got.p - p).abs() <= tol, || {
            format!("case {case}: p {} vs quadrature {p}", got.p)
        })?;
    }
    Ok(format!("{cases} cases, max |p diff| {worst:.1e}"))
}

fn random_walk(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let mut v = rng.random_range(-5i32..5) as f64;
    (0..len)
        .map(|_| {
            v += rng.random_range(-2i32..=2) as f64 * 0.5;
            v
        })
        .collect()
}

pub fn sda_properties(transforms: usize) -> Check {
    let mut rng = rng(0x7364_6121);
    let up: Vec<f64> = (0..40).map(|i| i as f64 * 0.25).collect();
    let down: Vec<f64> = up.iter().rev().copied().collect();
    let flat = vec![3.0; 40];
    ensure(sda(&up, &up) == Ok(1.0), || "identical increasing pair is not 1".into())?;
    ensure(sda(&up, &down) == Ok(-1.0), || "reversed pair is not -1".into())?;
    ensure(sda(&flat, &up) == Ok(0.0), || "constant pair is not 0".into())?;

    for case in 0..200 {
        let len = rng.random_range(2..80);
        let a = random_walk(&mut rng, len);
        let b = random_walk(&mut rng, len);
        let ab = sda(&a, &b).map_err(|e| e.to_string())?;
        let ba = sda(&b, &a).map_err(|e| e.to_string())?;
        ensure(ab == ba, || format!("case {case}: asymmetric {ab} vs {ba}"))?;
        ensure((-1.0..=1.0).contains(&ab), || format!("case {case}: {ab} out of range"))?;
    }

    for case in 0..transforms {
        let a = random_walk(&mut rng, 120);
        let b = random_walk(&mut rng, 120);
        let f = MonotoneMap::random(&mut rng);
        let g = MonotoneMap::random(&mut rng);
        let fa: Vec<f64> = a.iter().map(|&v| f.apply(v)).collect();
        let gb: Vec<f64> = b.iter().map(|&v| g.apply(v)).collect();
        ensure(diff_signs_of(&fa) == diff_signs_of(&a), || {
            format!("transform {case} changed the diff signs")
        })?;
        let before = sda(&a, &b).map_err(|e| e.to_string())?;
        let after = sda(&fa, &gb).map_err(|e| e.to_string())?;
        ensure(before == after, || {
            format!("transform {case}: {before} became {after}")
        })?;
    }
    Ok(format!("exact values, 200 symmetry cases, {transforms} monotone transforms"))
}

fn profile(seed: u64, modality: Modality) -> StimulusProfile {
    generate_profile(seed, &ProfileParams::new(format!("qa-{seed}"), modality)).unwrap()
}

fn check_frames(profile: &StimulusProfile, frames: &FrameSequence) -> Result<usize, String> {
    let gt = profile_to_signal(profile, frames.fps as f64).map_err(|e| e.to_string())?;
    ensure(gt.len() == frames.frames.len(), || {
        format!("{} frames for {} ground-truth samples", frames.frames.len(), gt.len())
    })?;
    for (frame, &level) in frames.frames.iter().zip(gt.values()) {
        let bytes = frames.ppm_bytes(frame);
        let (w, h, pixels) = decode_ppm(&bytes);
        ensure((w, h) == (frames.width as usize, frames.height as usize), || {
            "frame size mismatch".into()
        })?;
        let green = (25.0 + 230.0 * level).round() as u8;
        for px in pixels {
            ensure(px == [20, green, 12], || {
                format!("frame {} pixel {px:?}, expected green {green}", frame.index)
            })?;
        }
    }
    Ok(frames.frames.len())
}

/// Midpoints of the pieces between consecutive control points.
fn segment_midpoints(profile: &StimulusProfile) -> Vec<(f64, f64)> {
    profile
        .control_points
        .windows(2)
        .map(|w| {
            let mid = (w[0].time_ms + w[1].time_ms) as f64 / 2.0;
            (mid, (w[0].level + w[1].level) / 2.0)
        })
        .collect()
}

pub fn stimulus_consistency(profiles: u64, tol_hz: f64) -> Check {
    let mut frame_count = 0;
    let mut worst = 0.0f64;
    let mut probes = 0;
    for seed in 0..profiles {
        let visual = profile(seed, Modality::Visual);
        let frames = render_visual(&visual, 30, 4, 3).map_err(|e| e.to_string())?;
        frame_count += check_frames(&visual, &frames)?;

        let auditory = profile(1000 + seed, Modality::Auditory);
        let clip = render_audio(&auditory, 44_100).map_err(|e| e.to_string())?;
        for (mid_ms, level) in segment_midpoints(&auditory) {
            let expected = 50.0 + 420.0 * level;
            let got = zero_crossing_frequency(&clip.samples, 44_100, mid_ms / 1000.0, 0.06);
            worst = worst.max((got - expected).abs());
            probes += 1;
            ensure((got - expected).abs() <= tol_hz, || {
                format!("seed {seed} at {mid_ms} ms: {got:.3} Hz, expected {expected:.3} Hz")
            })?;
        }
    }
    Ok(format!(
        "{frame_count} frames exact, {probes} audio probes, max |diff| {worst:.3} Hz"
    ))
}

pub fn determinism() -> Check {
    let params = ProfileParams::new("det", Modality::Visual);
    let run = |modality: Modality| {
        let p = generate_profile(7, &ProfileParams { modality, ..params.clone() }).unwrap();
        let json = p.to_json();
        let media: Vec<u8> = match modality {
            Modality::Visual => {
                let frames = render_visual(&p, 30, 8, 8).unwrap();
                frames.frames.iter().flat_map(|f| frames.ppm_bytes(f)).collect()
            }
            Modality::Auditory => render_audio(&p, 44_100).unwrap().to_wav_bytes(),
        };
        (json, media)
    };
    for modality in [Modality::Visual, Modality::Auditory] {
        let (j1, m1) = run(modality);
        let (j2, m2) = run(modality);
        ensure(j1 == j2, || format!("{modality} profile documents differ"))?;
        ensure(m1 == m2, || format!("{modality} media bytes differ"))?;
    }
    Ok("profile JSON, WAV and PPM bytes identical across runs".into())
}

/// Wraps a trace set and records every index read.
pub struct Recording<'a> {
    pub inner: &'a AlignedTraceSet,
    pub reads: Mutex<Vec<usize>>,
}

impl TraceSource for Recording<'_> {
    fn annotator_ids(&self) -> &[String] {
        self.inner.annotator_ids()
    }

    fn trace(&self, index: usize) -> &SampledSignal {
        self.reads.lock().unwrap().push(index);
        self.inner.trace(index)
    }
}

fn random_set(rng: &mut impl Rng, stimulus: &str) -> AlignedTraceSet {
    let count = rng.random_range(2..=9);
    let len = rng.random_range(2..60);
    let ids = (0..count).map(|i| format!("a{i}")).collect();
    let traces = (0..count)
        .map(|_| {
            let values = (0..len).map(|_| rng.random_range(0.0..=1.0)).collect();
            SampledSignal::new(0, 10.0, values).unwrap()
        })
        .collect();
    AlignedTraceSet::new(stimulus, ids, traces).unwrap()
}

pub fn leak_free_gold(sets: usize) -> Check {
    let mut rng = rng(0x676f_6c64);
    let mut excluded_checks = 0;
    for k in 0..sets {
        let set = random_set(&mut rng, &format!("s{k}"));
        let gold = gold_signal(&set).map_err(|e| e.to_string())?;
        for t in 0..gold.len() {
            let column: Vec<f64> = set.traces().iter().map(|s| s.values()[t]).collect();
            let lo = column.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let g = gold.values()[t];
            ensure(lo <= g && g <= hi, || {
                format!("set {k} t {t}: gold {g} outside [{lo}, {hi}]")
            })?;
        }
        if set.annotator_ids().len() < 3 {
            continue;
        }
        for (i, id) in set.annotator_ids().iter().enumerate() {
            let recording = Recording {
                inner: &set,
                reads: Mutex::new(Vec::new()),
            };
            leave_one_out_gold(&recording, id).map_err(|e| e.to_string())?;
            let reads = recording.reads.into_inner().unwrap();
            ensure(!reads.contains(&i), || format!("set {k}: trace of {id} was read"))?;
            ensure(reads.len() == set.annotator_ids().len() - 1, || {
                format!("set {k}: {} reads excluding {id}", reads.len())
            })?;
            excluded_checks += 1;
        }
    }
    ensure(excluded_checks > 0, || "no leave-one-out checks ran".into())?;
    Ok(format!(
        "{sets} sets bounded, {excluded_checks} leave-one-out golds never read the excluded trace"
    ))
}
