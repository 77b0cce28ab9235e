//! Quality assurance for time-continuous annotation.
//!
//! The crate covers the whole offline pipeline:
//!
//! * [`signal`]: event traces, sample-and-hold resampling, min-max
//!   normalization and difference signs.
//! * [`stimulus`]: seeded QA stimulus profiles with a known ground truth,
//!   rendered as solid-colour frames or a triangle-oscillator WAV.
//! * [`agreement`]: SDA, Cohen's κ, Cronbach's α, Krippendorff's α and the
//!   supporting statistics.
//! * [`gold`]: median gold standards with leave-one-out variants.
//! * [`reliability`]: QA scoring, the threshold classifier and group reports.
//! * [`simulate`]: synthetic annotators.
//! * [`io`]: trace CSV formats.

pub mod agreement;
pub mod error;
pub mod gold;
pub mod io;
pub mod reliability;
pub mod seed;
pub mod signal;
pub mod simulate;
pub mod stimulus;

pub use error::{Error, Result};
pub use signal::{EventTrace, SampledSignal, TraceEvent};
