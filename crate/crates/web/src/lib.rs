//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes plain numbers or strings and returns a JSON document,
//! so the page needs no generated TypeScript types. Errors surface as thrown
//! strings.

use serde::Serialize;
use traceqa_core::agreement::{sda_signals, SdaVariant};
use traceqa_core::gold::{gold_signal, leave_one_out_gold, AlignedTraceSet};
use traceqa_core::reliability::{classify, score_qa, ScoringConfig};
use traceqa_core::seed::derive_seed;
use traceqa_core::signal::{prepare_trace, SampledSignal};
use traceqa_core::simulate::{simulate_annotator, AnnotatorKind, AnnotatorModel};
use traceqa_core::stimulus::{
    frequency_for_level, generate_profile, green_for_level, profile_to_signal, Modality,
    ProfileParams, StimulusProfile,
};
use wasm_bindgen::prelude::*;

const RATE_HZ: f64 = 10.0;

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn to_json(value: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(value).map_err(fail)
}

#[derive(Serialize)]
struct Preview {
    profile: StimulusProfile,
    rate_hz: f64,
    levels: Vec<f64>,
    /// Green channel per sample for visual profiles, oscillator Hz for auditory.
    rendering: Vec<f64>,
}

fn profile(seed: u64, id: &str, modality: Modality, duration_ms: u32, segments: u32, hold: f64) -> Result<StimulusProfile, String> {
    let params = ProfileParams {
        duration_ms: u64::from(duration_ms),
        segment_count: segments as usize,
        hold_fraction: hold,
        ..ProfileParams::new(id, modality)
    };
    generate_profile(seed, &params).map_err(fail)
}

/// Generates a QA profile and samples it at 10 Hz.
#[wasm_bindgen]
pub fn preview_profile(
    seed: u32,
    modality: &str,
    duration_ms: u32,
    segments: u32,
    hold_fraction: f64,
) -> Result<String, String> {
    let modality: Modality = modality.parse().map_err(fail)?;
    let id = format!("qa-{modality}-{seed}");
    let profile = profile(u64::from(seed), &id, modality, duration_ms, segments, hold_fraction)?;
    let levels = profile_to_signal(&profile, RATE_HZ).map_err(fail)?.values().to_vec();
    let rendering = levels
        .iter()
        .map(|&l| match modality {
            Modality::Visual => f64::from(green_for_level(l)),
            Modality::Auditory => frequency_for_level(l),
        })
        .collect();
    to_json(&Preview {
        profile,
        rate_hz: RATE_HZ,
        levels,
        rendering,
    })
}

#[derive(Serialize)]
struct QaRun {
    annotator: String,
    sda_visual: f64,
    sda_auditory: f64,
    mean_qa_sda: f64,
    label: String,
    /// Ground truth and the annotator's normalized trace on the 10 Hz grid.
    visual: [Vec<f64>; 2],
    auditory: [Vec<f64>; 2],
}

/// Simulates one annotator on a visual and an auditory QA test and scores it.
#[wasm_bindgen]
pub fn simulate_and_score(
    seed: u32,
    kind: &str,
    lag_ms: u32,
    noise_sigma: f64,
    sda_variant: &str,
) -> Result<String, String> {
    let kind: AnnotatorKind = kind.parse().map_err(fail)?;
    let variant: SdaVariant = sda_variant.parse().map_err(fail)?;
    let seed = u64::from(seed);
    let config = ScoringConfig {
        sda_variant: variant,
        ..ScoringConfig::default()
    };
    let model = AnnotatorModel::new(kind, derive_seed(seed, "annotator"))
        .with_lag(u64::from(lag_ms))
        .with_noise(noise_sigma);
    let annotator = format!("{kind}-01");

    let mut gts = Vec::new();
    let mut traces = Vec::new();
    for (k, modality) in [Modality::Visual, Modality::Auditory].into_iter().enumerate() {
        let id = format!("qa-{modality}");
        let p = profile(seed * 2 + k as u64, &id, modality, 30_000, 8, 0.2)?;
        let gt = profile_to_signal(&p, RATE_HZ).map_err(fail)?;
        traces.push(simulate_annotator(&gt, &model, &annotator, &id).map_err(fail)?);
        gts.push(gt);
    }
    let score = score_qa(&annotator, Some(&traces[0]), Some(&traces[1]), &gts[0], &gts[1], &config)
        .map_err(fail)?;
    let pair = |i: usize| -> Result<[Vec<f64>; 2], String> {
        let prepared = prepare_trace(&traces[i], &gts[i], config.initial_value).map_err(fail)?;
        Ok([gts[i].values().to_vec(), prepared.values().to_vec()])
    };
    to_json(&QaRun {
        label: classify(&score, config.threshold).to_string(),
        annotator,
        sda_visual: score.sda_visual,
        sda_auditory: score.sda_auditory,
        mean_qa_sda: score.mean_qa_sda,
        visual: pair(0)?,
        auditory: pair(1)?,
    })
}

#[derive(Serialize)]
struct Member {
    annotator: String,
    trace: Vec<f64>,
    /// SDA against the median of everyone else.
    loo_sda: f64,
}

#[derive(Serialize)]
struct GoldDemo {
    truth: Vec<f64>,
    gold: Vec<f64>,
    members: Vec<Member>,
}

/// Simulates a group of diligent (lagged, noisy) and random annotators on one
/// task stimulus and derives the median gold standard.
#[wasm_bindgen]
pub fn gold_demo(seed: u32, diligent: u32, random: u32) -> Result<String, String> {
    if diligent + random < 3 {
        return Err("the demo needs at least three annotators".into());
    }
    let seed = u64::from(seed);
    let p = profile(seed, "task", Modality::Visual, 30_000, 8, 0.2)?;
    let truth = profile_to_signal(&p, RATE_HZ).map_err(fail)?;

    let mut ids = Vec::new();
    let mut signals: Vec<SampledSignal> = Vec::new();
    for i in 0..diligent + random {
        let (id, model) = if i < diligent {
            let id = format!("diligent-{:02}", i + 1);
            let s = derive_seed(seed, &id);
            let model = AnnotatorModel::diligent(s).with_lag(s % 700).with_noise(0.03);
            (id, model)
        } else {
            let id = format!("random-{:02}", i - diligent + 1);
            let model = AnnotatorModel::random(derive_seed(seed, &id));
            (id, model)
        };
        let trace = simulate_annotator(&truth, &model, &id, "task").map_err(fail)?;
        signals.push(prepare_trace(&trace, &truth, 0.0).map_err(fail)?);
        ids.push(id);
    }
    let set = AlignedTraceSet::new("task", ids.clone(), signals.clone()).map_err(fail)?;
    let gold = gold_signal(&set).map_err(fail)?;
    let members = ids
        .into_iter()
        .zip(signals)
        .map(|(id, signal)| {
            let loo = leave_one_out_gold(&set, &id).map_err(fail)?;
            Ok(Member {
                loo_sda: sda_signals(&signal, &loo, SdaVariant::Product).map_err(fail)?,
                trace: signal.values().to_vec(),
                annotator: id,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    to_json(&GoldDemo {
        truth: truth.values().to_vec(),
        gold: gold.values().to_vec(),
        members,
    })
}
