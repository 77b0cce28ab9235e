//! HTTP routes over a [`Store`].
//!
//! | Method | Path | Body / response |
//! |---|---|---|
//! | POST | `/studies` | `StudyProtocol` → `{study_id, created}` |
//! | GET | `/studies/{id}` | `StudyProtocol` |
//! | POST | `/studies/{id}/participants` | `{participant_id, group?}` → `{participant_id, group, registered}` |
//! | GET | `/studies/{id}/participants/{pid}` | `SessionRecord` |
//! | GET | `/studies/{id}/participants/{pid}/next` | `NextTask` |
//! | POST | `/studies/{id}/participants/{pid}/traces` | `{stimulus_id, events}` → `{stimulus_id, next}` |
//! | GET | `/profiles/{id}` | the stored `.profile.json` |
//! | GET | `/studies/{id}/report` | `report.json`; query `rate_hz`, `sda_variant`, `threshold` |
//!
//! Errors are `{kind, message}` with 400, 404, 409, 422 or 500.

use std::future::Future;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use traceqa_core::agreement::SdaVariant;
use traceqa_core::reliability::{report_json, ScoringConfig};
use traceqa_core::TraceEvent;

use crate::error::{ServiceError, ServiceResult};
use crate::protocol::{NextTask, StudyProtocol};
use crate::store::{SessionRecord, Store, DEFAULT_GROUP};

type Shared = State<Arc<Store>>;

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/studies", post(create_study))
        .route("/studies/{id}", get(get_study))
        .route("/studies/{id}/participants", post(register))
        .route("/studies/{id}/participants/{pid}", get(get_session))
        .route("/studies/{id}/participants/{pid}/next", get(next_task))
        .route("/studies/{id}/participants/{pid}/traces", post(submit))
        .route("/studies/{id}/report", get(report))
        .route("/profiles/{id}", get(profile))
        .with_state(store)
}

/// Serves until `shutdown` resolves, then drains in-flight requests.
pub async fn serve(
    listener: tokio::net::TcpListener,
    store: Arc<Store>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(store))
        .with_graceful_shutdown(shutdown)
        .await
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> ServiceResult<T> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ServiceError::BadRequest(e.body_text()))
}

fn json_text(text: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], text).into_response()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub study_id: String,
    pub created: bool,
}

async fn create_study(
    State(store): Shared,
    payload: Result<Json<StudyProtocol>, JsonRejection>,
) -> ServiceResult<(StatusCode, Json<Created>)> {
    let protocol = body(payload)?;
    let study_id = protocol.study_id.clone();
    let created = store.create_study(protocol)?;
    let status = if created { StatusCode::CREATED } else { StatusCode::OK };
    Ok((status, Json(Created { study_id, created })))
}

async fn get_study(State(store): Shared, Path(id): Path<String>) -> ServiceResult<Json<StudyProtocol>> {
    Ok(Json(store.protocol(&id)?))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Registration {
    pub participant_id: String,
    #[serde(default)]
    pub group: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Registered {
    pub participant_id: String,
    pub group: String,
    pub registered: bool,
}

async fn register(
    State(store): Shared,
    Path(id): Path<String>,
    payload: Result<Json<Registration>, JsonRejection>,
) -> ServiceResult<(StatusCode, Json<Registered>)> {
    let reg = body(payload)?;
    let registered = store.register(&id, &reg.participant_id, reg.group.as_deref())?;
    let status = if registered { StatusCode::CREATED } else { StatusCode::OK };
    Ok((
        status,
        Json(Registered {
            participant_id: reg.participant_id,
            group: reg.group.unwrap_or_else(|| DEFAULT_GROUP.into()),
            registered,
        }),
    ))
}

async fn get_session(
    State(store): Shared,
    Path((id, pid)): Path<(String, String)>,
) -> ServiceResult<Json<SessionRecord>> {
    Ok(Json(store.session(&id, &pid)?))
}

async fn next_task(
    State(store): Shared,
    Path((id, pid)): Path<(String, String)>,
) -> ServiceResult<Json<NextTask>> {
    Ok(Json(store.next_task(&id, &pid)?))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TraceSubmission {
    pub stimulus_id: String,
    pub events: Vec<TraceEvent>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Accepted {
    pub stimulus_id: String,
    pub next: NextTask,
}

async fn submit(
    State(store): Shared,
    Path((id, pid)): Path<(String, String)>,
    payload: Result<Json<TraceSubmission>, JsonRejection>,
) -> ServiceResult<(StatusCode, Json<Accepted>)> {
    let sub = body(payload)?;
    store.submit(&id, &pid, &sub.stimulus_id, sub.events)?;
    let next = store.next_task(&id, &pid)?;
    Ok((
        StatusCode::CREATED,
        Json(Accepted {
            stimulus_id: sub.stimulus_id,
            next,
        }),
    ))
}

#[derive(Debug, Default, Deserialize)]
pub struct ReportQuery {
    pub rate_hz: Option<f64>,
    pub sda_variant: Option<SdaVariant>,
    pub threshold: Option<f64>,
}

impl ReportQuery {
    pub fn config(&self) -> ServiceResult<ScoringConfig> {
        let mut config = ScoringConfig::default();
        if let Some(rate) = self.rate_hz {
            if !(rate.is_finite() && rate > 0.0) {
                return Err(ServiceError::Validation(format!("rate_hz must be positive, got {rate}")));
            }
            config.rate_hz = rate;
        }
        if let Some(v) = self.sda_variant {
            config.sda_variant = v;
        }
        if let Some(t) = self.threshold {
            if !t.is_finite() {
                return Err(ServiceError::Validation("threshold must be finite".into()));
            }
            config.threshold = t;
        }
        Ok(config)
    }
}

async fn report(
    State(store): Shared,
    Path(id): Path<String>,
    query: Result<Query<ReportQuery>, QueryRejection>,
) -> ServiceResult<Response> {
    let Query(query) = query.map_err(|e| ServiceError::BadRequest(e.body_text()))?;
    let config = query.config()?;
    let report = store.report(&id, &config)?;
    Ok(json_text(report_json(&report)))
}

async fn profile(State(store): Shared, Path(id): Path<String>) -> ServiceResult<Response> {
    Ok(json_text(store.profile_text(&id)?))
}
