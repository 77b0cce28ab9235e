#![allow(dead_code)]

use traceqa_core::stimulus::{generate_profile, Modality, ProfileParams};
use traceqa_service::protocol::{Instructions, QaStimuli, TaskStimulus};
use traceqa_service::{Store, StudyProtocol};

pub fn store_with_profiles(dir: &std::path::Path) -> Store {
    let store = Store::open(dir).unwrap();
    for (id, modality, seed) in [("qa-visual", Modality::Visual, 1), ("qa-auditory", Modality::Auditory, 2)] {
        let params = ProfileParams {
            duration_ms: 20_000,
            segment_count: 6,
            hold_fraction: 0.0,
            ..ProfileParams::new(id, modality)
        };
        store.put_profile(&generate_profile(seed, &params).unwrap()).unwrap();
    }
    store
}

pub fn protocol(study_id: &str, tasks: usize) -> StudyProtocol {
    StudyProtocol {
        study_id: study_id.into(),
        qa_stimuli: QaStimuli {
            visual: "qa-visual".into(),
            auditory: "qa-auditory".into(),
        },
        task_stimuli: (0..tasks)
            .map(|i| TaskStimulus {
                stimulus_id: format!("video-{i:02}"),
                media: format!("media/video-{i:02}.mp4"),
                duration_ms: 10_000,
            })
            .collect(),
        instructions: Instructions::default(),
        affect_definition: "Engagement".into(),
        randomization_seed: 2024,
    }
}
