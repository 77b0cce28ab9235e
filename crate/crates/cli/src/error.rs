use std::io;
use std::path::Path;

use traceqa_service::ServiceError;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{what}: {source}")]
    Io { what: String, source: io::Error },
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn io(what: impl std::fmt::Display, source: io::Error) -> Self {
        CliError::Io {
            what: what.to_string(),
            source,
        }
    }

    /// 2 usage, 3 data or validation, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<traceqa_core::Error> for CliError {
    fn from(e: traceqa_core::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<ServiceError> for CliError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::Io { path, source } => CliError::Io { what: path, source },
            ServiceError::Core(e) => e.into(),
            other => CliError::Data(format!("{}: {other}", other.kind().replace('_', " "))),
        }
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))
}

pub fn write_bytes(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path.display(), e))
}

pub fn create_dir(path: &Path) -> CliResult<()> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path.display(), e))
}
