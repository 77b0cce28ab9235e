use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("{0}")]
    Sequence(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    InsufficientData(String),
    #[error("{0}")]
    BadRequest(String),
    #[error(transparent)]
    Core(traceqa_core::Error),
    #[error("store {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("corrupt store record in {path} line {line}: {message}")]
    Corrupt {
        path: String,
        line: usize,
        message: String,
    },
}

pub type ServiceResult<T> = Result<T, ServiceError>;

impl From<traceqa_core::Error> for ServiceError {
    fn from(e: traceqa_core::Error) -> Self {
        use traceqa_core::Error as E;
        match e {
            E::NotFound(m) => ServiceError::NotFound(m),
            E::InsufficientData(m) => ServiceError::InsufficientData(m),
            E::MalformedTrace(m) => ServiceError::Validation(m),
            other => ServiceError::Core(other),
        }
    }
}

impl ServiceError {
    pub fn io(path: impl std::fmt::Display, source: std::io::Error) -> Self {
        ServiceError::Io {
            path: path.to_string(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ServiceError::NotFound(_) => "not_found",
            ServiceError::Conflict(_) => "conflict",
            ServiceError::Sequence(_) => "sequence",
            ServiceError::Validation(_) => "validation",
            ServiceError::InsufficientData(_) => "insufficient_data",
            ServiceError::BadRequest(_) => "bad_request",
            ServiceError::Core(e) => e.kind(),
            ServiceError::Io { .. } => "io",
            ServiceError::Corrupt { .. } => "corrupt_store",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Conflict(_) | ServiceError::Sequence(_) => StatusCode::CONFLICT,
            ServiceError::Validation(_)
            | ServiceError::InsufficientData(_)
            | ServiceError::Core(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::Io { .. } | ServiceError::Corrupt { .. } => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        }
    }
}

/// Error body: `{"kind": "...", "message": "..."}`.
#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = self.status();
        if status.is_server_error() {
            log::error!("{self}");
        }
        let body = ErrorBody {
            kind: self.kind(),
            message: self.to_string(),
        };
        (status, Json(body)).into_response()
    }
}
