//! Local JSON API over a committed [`Analysis`].
//!
//! Reads are served from the last committed analysis. A config change
//! recomputes off the async runtime under a single-writer lock and swaps
//! the result in whole, so a reader sees either the old or the new layout.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use teamtrace_core::adaptscore::AdaptationScore;
use teamtrace_core::distance::{DistanceConfig, FieldError};
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::document::{analyze, Analysis, LayoutDocument, LayoutInputs, PerformanceRow};
use crate::error::LayoutError;

/// Raw events returned with a trace before truncation.
pub const EXCERPT_EVENTS: usize = 200;

pub struct AppState {
    inputs: LayoutInputs,
    committed: RwLock<Arc<Analysis>>,
    writer: tokio::sync::Mutex<()>,
}

impl AppState {
    pub fn new(inputs: LayoutInputs, cfg: &DistanceConfig) -> Result<Arc<Self>, LayoutError> {
        let analysis = analyze(&inputs, cfg, 1)?;
        Ok(Self::from_committed(inputs, analysis))
    }

    /// Serves `analysis` as-is until the next config change.
    pub fn from_committed(inputs: LayoutInputs, analysis: Analysis) -> Arc<Self> {
        Arc::new(AppState { inputs, committed: RwLock::new(Arc::new(analysis)), writer: tokio::sync::Mutex::new(()) })
    }

    pub fn current(&self) -> Arc<Analysis> {
        self.committed.read().expect("layout lock poisoned").clone()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDetail {
    pub id: String,
    pub kind: String,
    pub states: Vec<String>,
    pub pattern_id: Option<String>,
    pub total_events: usize,
    pub events: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoresTable {
    pub version: u64,
    pub adaptation: Vec<AdaptationScore>,
    pub performance: Vec<PerformanceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigRejected {
    pub errors: Vec<FieldError>,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

async fn get_layout(State(s): State<Arc<AppState>>) -> Json<LayoutDocument> {
    Json(s.current().document.clone())
}

async fn get_scores(State(s): State<Arc<AppState>>) -> Json<ScoresTable> {
    let a = s.current();
    Json(ScoresTable { version: a.document.version, adaptation: a.scores.clone(), performance: s.inputs.performance.clone() })
}

async fn get_trace(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> Response {
    let Some(t) = s.inputs.trace(&id) else {
        return error(StatusCode::NOT_FOUND, format!("no trace {id}"));
    };
    let events = s.inputs.events.get(&id).map(Vec::as_slice).unwrap_or_default();
    let excerpt = events
        .iter()
        .take(EXCERPT_EVENTS)
        .map(|e| serde_json::to_value(e).expect("events serialize"))
        .collect();
    let a = s.current();
    Json(TraceDetail {
        id: t.id.clone(),
        kind: t.seq.kind_name().to_string(),
        states: t.seq.labels(),
        pattern_id: a.document.sequence_graph.pattern_of_trace(&id).map(|p| p.id.clone()),
        total_events: events.len(),
        events: excerpt,
    })
    .into_response()
}

async fn post_config(State(s): State<Arc<AppState>>, body: String) -> Response {
    let cfg = match DistanceConfig::from_json_checked(&body) {
        Ok(c) => c,
        Err(errors) => return (StatusCode::BAD_REQUEST, Json(ConfigRejected { errors })).into_response(),
    };
    let corpus_kind = s.inputs.traces.first().map(|t| t.seq.kind_name());
    if corpus_kind.is_some_and(|k| k != cfg.metric.as_str()) {
        let errors = vec![FieldError {
            field: "metric".into(),
            message: format!("corpus holds {} sequences", corpus_kind.unwrap_or_default()),
        }];
        return (StatusCode::BAD_REQUEST, Json(ConfigRejected { errors })).into_response();
    }

    let _writer = s.writer.lock().await;
    let next = s.current().document.version + 1;
    let worker = s.clone();
    let result = tokio::task::spawn_blocking(move || analyze(&worker.inputs, &cfg, next)).await;
    match result {
        Ok(Ok(analysis)) => {
            let doc = analysis.document.clone();
            *s.committed.write().expect("layout lock poisoned") = Arc::new(analysis);
            Json(doc).into_response()
        }
        Ok(Err(e)) => error(StatusCode::INTERNAL_SERVER_ERROR, format!("recompute failed, previous layout kept: {e}")),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, format!("recompute aborted, previous layout kept: {e}")),
    }
}

/// Allows `origins`, or any origin when empty.
pub fn cors(origins: &[String]) -> CorsLayer {
    let allow = if origins.is_empty() {
        AllowOrigin::any()
    } else {
        AllowOrigin::list(origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()))
    };
    CorsLayer::new().allow_origin(allow).allow_methods([Method::GET, Method::POST]).allow_headers([header::CONTENT_TYPE])
}

pub fn router(state: Arc<AppState>, origins: &[String]) -> Router {
    Router::new()
        .route("/api/layout", get(get_layout))
        .route("/api/scores", get(get_scores))
        .route("/api/traces/{*id}", get(get_trace))
        .route("/api/config", post(post_config))
        .with_state(state)
        .layer(cors(origins))
}

pub async fn serve(addr: SocketAddr, state: Arc<AppState>, origins: &[String]) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state, origins)).await
}

/// Ids of the patterns that contain each state label.
pub fn patterns_with_state(doc: &LayoutDocument) -> BTreeMap<String, Vec<String>> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for p in &doc.sequence_graph.patterns {
        let mut seen: Vec<&String> = p.states.iter().collect();
        seen.sort();
        seen.dedup();
        for s in seen {
            out.entry(s.clone()).or_default().push(p.id.clone());
        }
    }
    out
}
