use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
    #[error("malformed signal: {0}")]
    MalformedSignal(String),
    #[error("signal too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("modality mismatch: expected {expected} profile, got {got}")]
    ModalityMismatch {
        expected: &'static str,
        got: &'static str,
    },
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("alpha is undefined: {0}")]
    UndefinedAlpha(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("correlation is undefined: {0}")]
    UndefinedCorrelation(String),
    #[error("test statistic is undefined: {0}")]
    UndefinedTest(String),
    #[error("insufficient traces: need at least {needed}, got {got}")]
    InsufficientTraces { needed: usize, got: usize },
    #[error("not found: {0}")]
    NotFound(String),
    #[error("incomplete QA data for annotator {0}")]
    IncompleteQa(String),
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedTrace(_) => "malformed_trace",
            Error::MalformedSignal(_) => "malformed_signal",
            Error::TooShort { .. } => "too_short",
            Error::Shape(_) => "shape",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::ModalityMismatch { .. } => "modality_mismatch",
            Error::MissingData(_) => "missing_data",
            Error::UndefinedAlpha(_) => "undefined_alpha",
            Error::InsufficientData(_) => "insufficient_data",
            Error::UndefinedCorrelation(_) => "undefined_correlation",
            Error::UndefinedTest(_) => "undefined_test",
            Error::InsufficientTraces { .. } => "insufficient_traces",
            Error::NotFound(_) => "not_found",
            Error::IncompleteQa(_) => "incomplete_qa",
            Error::InconsistentInput(_) => "inconsistent_input",
            Error::Parse(_) => "parse",
        }
    }
}
