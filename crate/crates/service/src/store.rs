//! File-backed study store.
//!
//! Layout under the store root:
//!
//! ```text
//! profiles/<profile_id>.profile.json
//! studies/<study_id>.log.jsonl
//! ```
//!
//! Each study log is append-only, one JSON record per line, and starts with
//! a `study_created` record. State is rebuilt by replaying every log on
//! open. Writers are serialized by one mutex; readers take a cheap snapshot
//! and never block on the disk.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use traceqa_core::reliability::{group_report, AnnotatorRecord, ReliabilityReport, ScoringConfig, StudyData};
use traceqa_core::signal::validate_events;
use traceqa_core::stimulus::{profile_to_signal, Modality, StimulusProfile};
use traceqa_core::{EventTrace, TraceEvent};

use crate::error::{ServiceError, ServiceResult};
use crate::protocol::{validate_id, NextTask, Phase, StudyProtocol, TaskDescriptor};

pub const DEFAULT_GROUP: &str = "default";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Record {
    StudyCreated {
        protocol: StudyProtocol,
    },
    ParticipantRegistered {
        participant_id: String,
        group: String,
    },
    TraceSubmitted {
        participant_id: String,
        stimulus_id: String,
        events: Vec<TraceEvent>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub recorded_at_ms: u64,
    #[serde(flatten)]
    pub record: Record,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Submission {
    pub events: Vec<TraceEvent>,
    pub submitted_at_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    Pending,
    Submitted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskState {
    pub stimulus_id: String,
    pub status: TaskStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub submitted_at_ms: Option<u64>,
}

/// One participant's progress through a study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub participant_id: String,
    pub study_id: String,
    pub group: String,
    pub registered_at_ms: u64,
    pub tasks: Vec<TaskState>,
}

#[derive(Debug, Clone)]
struct Session {
    group: String,
    registered_at_ms: u64,
    sequence: Vec<String>,
    submissions: BTreeMap<String, Submission>,
}

impl Session {
    /// Submissions are strictly sequential, so the submitted tasks are a
    /// prefix of the sequence.
    fn current(&self) -> Option<(usize, &str)> {
        let i = self.submissions.len();
        self.sequence.get(i).map(|s| (i, s.as_str()))
    }
}

#[derive(Debug, Clone)]
struct StudyState {
    protocol: StudyProtocol,
    participants: BTreeMap<String, Session>,
}

impl StudyState {
    fn apply(&mut self, entry: &LogEntry) -> ServiceResult<()> {
        match &entry.record {
            Record::StudyCreated { .. } => Err(ServiceError::Conflict(format!(
                "study {} already exists",
                self.protocol.study_id
            ))),
            Record::ParticipantRegistered {
                participant_id,
                group,
            } => {
                if let Some(existing) = self.participants.get(participant_id) {
                    return Err(ServiceError::Conflict(format!(
                        "participant {participant_id} is already registered in group {}",
                        existing.group
                    )));
                }
                self.participants.insert(
                    participant_id.clone(),
                    Session {
                        group: group.clone(),
                        registered_at_ms: entry.recorded_at_ms,
                        sequence: self.protocol.sequence_for(participant_id),
                        submissions: BTreeMap::new(),
                    },
                );
                Ok(())
            }
            Record::TraceSubmitted {
                participant_id,
                stimulus_id,
                events,
            } => {
                let session = self.participants.get_mut(participant_id).ok_or_else(|| {
                    ServiceError::NotFound(format!("participant {participant_id} is not registered"))
                })?;
                if !session.sequence.contains(stimulus_id) {
                    return Err(ServiceError::NotFound(format!(
                        "stimulus {stimulus_id} is not part of study {}",
                        self.protocol.study_id
                    )));
                }
                if session.submissions.contains_key(stimulus_id) {
                    return Err(ServiceError::Conflict(format!(
                        "{participant_id} already submitted {stimulus_id}"
                    )));
                }
                match session.current() {
                    Some((_, current)) if current == stimulus_id => {}
                    Some((_, current)) => {
                        return Err(ServiceError::Sequence(format!(
                            "{participant_id} must submit {current} before {stimulus_id}"
                        )))
                    }
                    None => unreachable!("unsubmitted stimulus implies a pending task"),
                }
                validate_events(events)?;
                session.submissions.insert(
                    stimulus_id.clone(),
                    Submission {
                        events: events.clone(),
                        submitted_at_ms: entry.recorded_at_ms,
                    },
                );
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
struct State {
    studies: BTreeMap<String, Arc<StudyState>>,
}

#[derive(Debug)]
pub struct Store {
    root: PathBuf,
    snapshot: RwLock<Arc<State>>,
    writer: Mutex<()>,
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Cuts a torn final line left by a crash mid-append.
fn repair_tail(path: &Path) -> ServiceResult<()> {
    let bytes = fs::read(path).map_err(|e| ServiceError::io(path.display(), e))?;
    if bytes.is_empty() || bytes.ends_with(b"\n") {
        return Ok(());
    }
    let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    log::warn!(
        "{}: dropping {} bytes of an incomplete final record",
        path.display(),
        bytes.len() - keep
    );
    let file = OpenOptions::new()
        .write(true)
        .open(path)
        .map_err(|e| ServiceError::io(path.display(), e))?;
    file.set_len(keep as u64)
        .map_err(|e| ServiceError::io(path.display(), e))
}

impl Store {
    /// Opens (creating if needed) a store and replays every study log.
    pub fn open(root: impl Into<PathBuf>) -> ServiceResult<Self> {
        let root = root.into();
        for dir in ["studies", "profiles"] {
            let path = root.join(dir);
            fs::create_dir_all(&path).map_err(|e| ServiceError::io(path.display(), e))?;
        }
        let studies_dir = root.join("studies");
        let mut logs: Vec<PathBuf> = fs::read_dir(&studies_dir)
            .map_err(|e| ServiceError::io(studies_dir.display(), e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.to_string_lossy().ends_with(".log.jsonl"))
            .collect();
        logs.sort();

        let mut state = State::default();
        for path in logs {
            let study = Self::replay(&path)?;
            state
                .studies
                .insert(study.protocol.study_id.clone(), Arc::new(study));
        }
        Ok(Self {
            root,
            snapshot: RwLock::new(Arc::new(state)),
            writer: Mutex::new(()),
        })
    }

    fn replay(path: &Path) -> ServiceResult<StudyState> {
        repair_tail(path)?;
        let shown = path.display().to_string();
        let file = File::open(path).map_err(|e| ServiceError::io(&shown, e))?;
        let corrupt = |line: usize, message: String| ServiceError::Corrupt {
            path: shown.clone(),
            line,
            message,
        };
        let mut study: Option<StudyState> = None;
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| ServiceError::io(&shown, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: LogEntry =
                serde_json::from_str(&line).map_err(|e| corrupt(i + 1, e.to_string()))?;
            match (&mut study, &entry.record) {
                (None, Record::StudyCreated { protocol }) => {
                    let expected = format!("{}.log.jsonl", protocol.study_id);
                    if !shown.ends_with(&expected) {
                        return Err(corrupt(i + 1, format!("log of study {} has the wrong name", protocol.study_id)));
                    }
                    study = Some(StudyState {
                        protocol: protocol.clone(),
                        participants: BTreeMap::new(),
                    });
                }
                (None, _) => return Err(corrupt(i + 1, "log does not start with study_created".into())),
                (Some(s), _) => s.apply(&entry).map_err(|e| corrupt(i + 1, e.to_string()))?,
            }
        }
        study.ok_or_else(|| corrupt(0, "empty log".into()))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn snapshot(&self) -> Arc<State> {
        self.snapshot.read().expect("snapshot lock").clone()
    }

    fn study(&self, study_id: &str) -> ServiceResult<Arc<StudyState>> {
        self.snapshot()
            .studies
            .get(study_id)
            .cloned()
            .ok_or_else(|| ServiceError::NotFound(format!("study {study_id} does not exist")))
    }

    fn log_path(&self, study_id: &str) -> PathBuf {
        self.root.join("studies").join(format!("{study_id}.log.jsonl"))
    }

    pub fn profile_path(&self, profile_id: &str) -> PathBuf {
        self.root
            .join("profiles")
            .join(format!("{profile_id}.profile.json"))
    }

    /// The stored profile document, byte for byte.
    pub fn profile_text(&self, profile_id: &str) -> ServiceResult<String> {
        validate_id("profile id", profile_id)
            .map_err(|_| ServiceError::NotFound(format!("profile {profile_id} does not exist")))?;
        let path = self.profile_path(profile_id);
        match fs::read_to_string(&path) {
            Ok(text) => Ok(text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(ServiceError::NotFound(
                format!("profile {profile_id} does not exist"),
            )),
            Err(e) => Err(ServiceError::io(path.display(), e)),
        }
    }

    pub fn profile(&self, profile_id: &str) -> ServiceResult<StimulusProfile> {
        let profile = StimulusProfile::from_json(&self.profile_text(profile_id)?)?;
        if profile.stimulus_id != profile_id {
            return Err(ServiceError::Validation(format!(
                "profile file {profile_id} holds stimulus {}",
                profile.stimulus_id
            )));
        }
        Ok(profile)
    }

    /// Writes a profile document into the store.
    pub fn put_profile(&self, profile: &StimulusProfile) -> ServiceResult<()> {
        validate_id("profile id", &profile.stimulus_id)?;
        profile.validate()?;
        let path = self.profile_path(&profile.stimulus_id);
        fs::write(&path, profile.to_json()).map_err(|e| ServiceError::io(path.display(), e))
    }

    fn append(&self, study_id: &str, entry: &LogEntry, create: bool) -> ServiceResult<()> {
        let path = self.log_path(study_id);
        let mut line = serde_json::to_string(entry).expect("log records serialize");
        line.push('\n');
        let mut options = OpenOptions::new();
        if create {
            options.write(true).create_new(true);
        } else {
            options.append(true);
        }
        let mut file = options
            .open(&path)
            .map_err(|e| ServiceError::io(path.display(), e))?;
        file.write_all(line.as_bytes())
            .and_then(|_| file.sync_data())
            .map_err(|e| ServiceError::io(path.display(), e))
    }

    fn publish(&self, study_id: &str, study: StudyState) {
        let mut guard = self.snapshot.write().expect("snapshot lock");
        let mut next = (**guard).clone();
        next.studies.insert(study_id.to_string(), Arc::new(study));
        *guard = Arc::new(next);
    }

    /// Creates a study. Returns `false` when an identical study already
    /// exists.
    pub fn create_study(&self, protocol: StudyProtocol) -> ServiceResult<bool> {
        protocol.validate()?;
        for (id, modality) in [
            (&protocol.qa_stimuli.visual, Modality::Visual),
            (&protocol.qa_stimuli.auditory, Modality::Auditory),
        ] {
            let profile = self.profile(id)?;
            if profile.modality != modality {
                return Err(ServiceError::Validation(format!(
                    "profile {id} is {}, expected {modality}",
                    profile.modality
                )));
            }
        }
        let _write = self.writer.lock().expect("writer lock");
        if let Some(existing) = self.snapshot().studies.get(&protocol.study_id) {
            return if existing.protocol == protocol {
                Ok(false)
            } else {
                Err(ServiceError::Conflict(format!(
                    "study {} exists with a different protocol",
                    protocol.study_id
                )))
            };
        }
        let entry = LogEntry {
            recorded_at_ms: now_ms(),
            record: Record::StudyCreated {
                protocol: protocol.clone(),
            },
        };
        self.append(&protocol.study_id, &entry, true)?;
        self.publish(
            &protocol.study_id.clone(),
            StudyState {
                protocol,
                participants: BTreeMap::new(),
            },
        );
        Ok(true)
    }

    /// Validates `record` against the current state, persists it, then
    /// publishes the new state.
    fn commit(&self, study_id: &str, record: Record) -> ServiceResult<()> {
        let _write = self.writer.lock().expect("writer lock");
        let mut study = (*self.study(study_id)?).clone();
        let entry = LogEntry {
            recorded_at_ms: now_ms(),
            record,
        };
        study.apply(&entry)?;
        self.append(study_id, &entry, false)?;
        self.publish(study_id, study);
        Ok(())
    }

    /// Registers a participant. Returns `false` when they are already
    /// registered in the same group.
    pub fn register(
        &self,
        study_id: &str,
        participant_id: &str,
        group: Option<&str>,
    ) -> ServiceResult<bool> {
        validate_id("participant id", participant_id)?;
        let group = group.unwrap_or(DEFAULT_GROUP);
        validate_id("group", group)?;
        let study = self.study(study_id)?;
        if let Some(existing) = study.participants.get(participant_id) {
            if existing.group == group {
                return Ok(false);
            }
        }
        match self.commit(
            study_id,
            Record::ParticipantRegistered {
                participant_id: participant_id.into(),
                group: group.into(),
            },
        ) {
            Ok(()) => Ok(true),
            // lost a race against an identical registration
            Err(ServiceError::Conflict(_))
                if self
                    .study(study_id)?
                    .participants
                    .get(participant_id)
                    .is_some_and(|s| s.group == group) =>
            {
                Ok(false)
            }
            Err(e) => Err(e),
        }
    }

    pub fn protocol(&self, study_id: &str) -> ServiceResult<StudyProtocol> {
        Ok(self.study(study_id)?.protocol.clone())
    }

    pub fn study_ids(&self) -> Vec<String> {
        self.snapshot().studies.keys().cloned().collect()
    }

    pub fn next_task(&self, study_id: &str, participant_id: &str) -> ServiceResult<NextTask> {
        let study = self.study(study_id)?;
        let session = study.participants.get(participant_id).ok_or_else(|| {
            ServiceError::NotFound(format!("participant {participant_id} is not registered"))
        })?;
        let Some((position, stimulus_id)) = session.current() else {
            return Ok(NextTask::Done);
        };
        let p = &study.protocol;
        let total = session.sequence.len();
        let descriptor = if position < 2 {
            let (phase, instructions) = if position == 0 {
                (Phase::VisualQa, &p.instructions.visual_qa)
            } else {
                (Phase::AuditoryQa, &p.instructions.auditory_qa)
            };
            TaskDescriptor {
                phase,
                position,
                total,
                stimulus_id: stimulus_id.to_string(),
                profile_url: Some(format!("/profiles/{stimulus_id}")),
                media: None,
                duration_ms: self.profile(stimulus_id)?.duration_ms,
                instructions: instructions.clone(),
                affect_definition: None,
            }
        } else {
            let task = p.task(stimulus_id).expect("sequence built from the protocol");
            TaskDescriptor {
                phase: Phase::Task,
                position,
                total,
                stimulus_id: stimulus_id.to_string(),
                profile_url: None,
                media: Some(task.media.clone()),
                duration_ms: task.duration_ms,
                instructions: p.instructions.task.clone(),
                affect_definition: Some(p.affect_definition.clone()),
            }
        };
        Ok(NextTask::Pending(descriptor))
    }

    pub fn submit(
        &self,
        study_id: &str,
        participant_id: &str,
        stimulus_id: &str,
        events: Vec<TraceEvent>,
    ) -> ServiceResult<()> {
        self.commit(
            study_id,
            Record::TraceSubmitted {
                participant_id: participant_id.into(),
                stimulus_id: stimulus_id.into(),
                events,
            },
        )
    }

    pub fn session(&self, study_id: &str, participant_id: &str) -> ServiceResult<SessionRecord> {
        let study = self.study(study_id)?;
        let session = study.participants.get(participant_id).ok_or_else(|| {
            ServiceError::NotFound(format!("participant {participant_id} is not registered"))
        })?;
        Ok(SessionRecord {
            participant_id: participant_id.into(),
            study_id: study_id.into(),
            group: session.group.clone(),
            registered_at_ms: session.registered_at_ms,
            tasks: session
                .sequence
                .iter()
                .map(|s| {
                    let sub = session.submissions.get(s);
                    TaskState {
                        stimulus_id: s.clone(),
                        status: if sub.is_some() {
                            TaskStatus::Submitted
                        } else {
                            TaskStatus::Pending
                        },
                        submitted_at_ms: sub.map(|x| x.submitted_at_ms),
                    }
                })
                .collect(),
        })
    }

    /// Report inputs assembled from the persisted traces.
    pub fn study_data(&self, study_id: &str, rate_hz: f64) -> ServiceResult<StudyData> {
        let study = self.study(study_id)?;
        let p = &study.protocol;
        let visual_gt = profile_to_signal(&self.profile(&p.qa_stimuli.visual)?, rate_hz)?;
        let auditory_gt = profile_to_signal(&self.profile(&p.qa_stimuli.auditory)?, rate_hz)?;
        let mut groups: BTreeMap<String, Vec<AnnotatorRecord>> = BTreeMap::new();
        for (pid, session) in &study.participants {
            let trace = |stimulus: &str| {
                session.submissions.get(stimulus).map(|s| EventTrace {
                    participant_id: pid.clone(),
                    stimulus_id: stimulus.to_string(),
                    events: s.events.clone(),
                })
            };
            let record = AnnotatorRecord {
                annotator_id: pid.clone(),
                visual: trace(&p.qa_stimuli.visual),
                auditory: trace(&p.qa_stimuli.auditory),
                tasks: p
                    .task_stimuli
                    .iter()
                    .filter_map(|t| trace(&t.stimulus_id).map(|tr| (t.stimulus_id.clone(), tr)))
                    .collect(),
            };
            groups.entry(session.group.clone()).or_default().push(record);
        }
        Ok(StudyData {
            visual_gt,
            auditory_gt,
            task_durations: p
                .task_stimuli
                .iter()
                .map(|t| (t.stimulus_id.clone(), t.duration_ms))
                .collect(),
            groups,
        })
    }

    pub fn report(&self, study_id: &str, config: &ScoringConfig) -> ServiceResult<ReliabilityReport> {
        let data = self.study_data(study_id, config.rate_hz)?;
        Ok(group_report(&data, config)?)
    }
}
