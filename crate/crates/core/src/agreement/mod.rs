//! Inter-rater reliability metrics and the statistics built on them.
//!
//! Pairwise measures ([`sda`], [`cohens_kappa`]) compare one annotator to a
//! reference signal. Group measures ([`cronbach_alpha`],
//! [`krippendorff_alpha`]) operate on a [`RatingsMatrix`] with one row per
//! annotator and one column per time sample.

mod cronbach;
mod kappa;
mod krippendorff;
mod ratings;
mod sda;
mod stats;

pub use cronbach::cronbach_alpha;
pub use kappa::cohens_kappa;
pub use krippendorff::{krippendorff_alpha, MeasurementLevel};
pub use ratings::RatingsMatrix;
pub use sda::{sda, sda_signals, sda_with, SdaVariant};
pub use stats::{mean_ci, pearson, t_test, MeanCi, TTest, CI_Z};
