//! Study orchestration for continuous-annotation QA.
//!
//! A study runs two QA tests (visual, then auditory) followed by the task
//! stimuli in a per-participant seeded order. Submissions are appended to a
//! JSON-lines log per study; reports are computed from the log on demand.

pub mod error;
pub mod http;
pub mod protocol;
pub mod store;

pub use error::{ServiceError, ServiceResult};
pub use http::{router, serve};
pub use protocol::{NextTask, Phase, StudyProtocol, TaskDescriptor};
pub use store::{SessionRecord, Store};
