//! Read-only HTTP API over a loaded run log.

use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use worldsync_core::analytics::chain_trace;
use worldsync_core::runlog::RunLog;
use worldsync_core::snapshot::Snapshot;
use worldsync_core::{AttributeKind, Error, Fleet, Millis};

pub struct AppState {
    pub log: RunLog,
    pub fleet: Fleet,
}

pub fn router(log: RunLog) -> anyhow::Result<Router> {
    let fleet = log.header.config.fleet()?;
    let state = Arc::new(AppState { log, fleet });
    Ok(Router::new()
        .route("/api/meta", get(meta))
        .route("/api/snapshot/{tick}", get(snapshot))
        .route("/api/diff/{attribute}/{tick}", get(diff))
        .route("/api/timeline", get(timeline))
        .route("/api/summary/{tick}", get(summary))
        .route("/api/trace/{task}", get(trace))
        .fallback(|| async { ApiError::not_found("no such endpoint") })
        .with_state(state))
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn not_found(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::NOT_FOUND,
            code: "not_found",
            message: message.into(),
        }
    }

    fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            code,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn parse_tick(raw: &str) -> Result<u64, ApiError> {
    raw.parse()
        .map_err(|_| ApiError::bad_request("invalid_tick", format!("tick must be a non-negative integer, got {raw:?}")))
}

fn lookup<'a>(state: &'a AppState, raw: &str) -> Result<&'a Snapshot, ApiError> {
    let tick = parse_tick(raw)?;
    state
        .log
        .snapshot(tick)
        .ok_or_else(|| ApiError::not_found(format!("no snapshot for tick {tick}")))
}

async fn meta(State(state): State<Arc<AppState>>) -> Json<Value> {
    let h = &state.log.header;
    let labels: Vec<String> = state.fleet.agents().map(|a| state.fleet.label(a)).collect();
    let ticks = state.log.tick_range().map(|(first, last)| {
        json!({ "first": first, "last": last, "count": state.log.snapshots.len() })
    });
    Json(json!({
        "format": h.format,
        "schema_version": h.schema_version,
        "seed": h.seed,
        "config": h.config,
        "ticks": ticks,
        "agents": labels,
        "base_station": state.fleet.base,
        "monitored": AttributeKind::MONITORED.iter().map(|k| k.code()).collect::<Vec<_>>(),
    }))
}

async fn snapshot(State(state): State<Arc<AppState>>, Path(tick): Path<String>) -> ApiResult<Snapshot> {
    lookup(&state, &tick).map(|s| Json(s.clone()))
}

async fn diff(State(state): State<Arc<AppState>>, Path((attribute, tick)): Path<(String, String)>) -> ApiResult<Value> {
    let kind = AttributeKind::parse(&attribute)
        .filter(|k| k.monitored())
        .ok_or_else(|| {
            ApiError::bad_request(
                "unmonitored_attribute",
                format!("attribute {attribute:?} is not one of battery, sciencezone, comm"),
            )
        })?;
    let snap = lookup(&state, &tick)?;
    let matrix = &snap.diffs[&kind];
    Ok(Json(json!({
        "tick": snap.tick,
        "attribute": kind,
        "code": kind.code(),
        "matrix": matrix,
        "columns": matrix.column_summaries(),
        "contrarian_sets": matrix.contrarian_sets(),
    })))
}

#[derive(Debug, Deserialize)]
struct Window {
    from: Option<f64>,
    to: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Timeline {
    from: f64,
    to: f64,
    events: Vec<worldsync_core::scheduler::TimelineEvent>,
}

fn secs_to_millis(s: f64) -> Result<Millis, ApiError> {
    if s.is_finite() && s >= 0.0 {
        Ok(Millis((s * 1000.0).round() as u64))
    } else {
        Err(ApiError::bad_request("invalid_window", format!("bad time {s}")))
    }
}

async fn timeline(State(state): State<Arc<AppState>>, Query(w): Query<Window>) -> ApiResult<Timeline> {
    let last = state.log.snapshots.last();
    let end = last.map_or(0.0, |s| s.time.as_secs_f64());
    let from = w.from.unwrap_or(0.0);
    let to = w.to.unwrap_or(end);
    if from > to {
        return Err(ApiError::bad_request("invalid_window", format!("from {from} is after to {to}")));
    }
    let (lo, hi) = (secs_to_millis(from)?, secs_to_millis(to)?);
    let events = last.map(|s| s.events_between(lo, hi)).unwrap_or_default();
    Ok(Json(Timeline { from, to, events }))
}

async fn summary(State(state): State<Arc<AppState>>, Path(tick): Path<String>) -> ApiResult<Value> {
    let snap = lookup(&state, &tick)?;
    Ok(Json(json!({ "tick": snap.tick, "summary": snap.summary, "anomalies": snap.anomalies })))
}

async fn trace(State(state): State<Arc<AppState>>, Path(task): Path<String>) -> ApiResult<Value> {
    let events = state.log.snapshots.last().map(|s| s.events.as_slice()).unwrap_or_default();
    match chain_trace(&task, events, &state.fleet) {
        Ok(t) => Ok(Json(serde_json::to_value(t).expect("trace serializes"))),
        Err(Error::NotFound(msg)) => Err(ApiError::not_found(msg)),
        Err(e) => Err(ApiError::bad_request("invalid_task", e.to_string())),
    }
}
