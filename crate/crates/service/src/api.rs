//! Request and response documents and the route handlers.

use std::sync::{Arc, Mutex};

use amkg_core::cypher::Value;
use amkg_core::nl::{Answer, AnswerStatus, Engine, IntentCategory, TranslatorMode};
use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::sessions::{HistoryEntry, SessionStore};

/// Longest accepted question, in characters after trimming.
pub const MAX_TEXT_CHARS: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryRequest {
    pub text: String,
    #[serde(default)]
    pub session_id: Option<String>,
    #[serde(default)]
    pub translator_mode: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResponse {
    pub status: AnswerStatus,
    pub answer_text: String,
    pub cypher: Option<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<serde_json::Value>>,
    pub intent: IntentCategory,
    pub elapsed_ms: u64,
    pub session_id: String,
}

impl QueryResponse {
    fn new(answer: Answer, session_id: String) -> Self {
        QueryResponse {
            status: answer.status,
            answer_text: answer.text,
            cypher: answer.cypher,
            columns: answer.columns,
            rows: answer.rows.iter().map(|r| r.iter().map(to_json).collect()).collect(),
            intent: answer.intent,
            elapsed_ms: answer.elapsed_ms,
            session_id,
        }
    }
}

fn to_json(v: &Value) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

#[derive(Debug, Deserialize)]
pub struct HistoryParams {
    pub session_id: Option<String>,
}

pub struct AppState {
    pub engine: Engine,
    pub default_mode: TranslatorMode,
    pub sessions: Mutex<SessionStore>,
    schema_json: String,
}

impl AppState {
    pub fn new(engine: Engine, default_mode: TranslatorMode) -> Self {
        let schema_json = engine.schema().to_json();
        AppState { engine, default_mode, sessions: Mutex::new(SessionStore::new()), schema_json }
    }
}

fn bad_request(message: impl Into<String>) -> Response {
    (StatusCode::BAD_REQUEST, Json(json!({"error": message.into()}))).into_response()
}

/// Checks a raw body against the request contract.
pub fn parse_request(body: &[u8]) -> Result<(QueryRequest, Option<TranslatorMode>), String> {
    let request: QueryRequest = serde_json::from_slice(body).map_err(|e| format!("invalid request body: {e}"))?;
    let chars = request.text.trim().chars().count();
    if chars > MAX_TEXT_CHARS {
        return Err(format!("text has {chars} characters, the limit is {MAX_TEXT_CHARS}"));
    }
    let mode = match &request.translator_mode {
        Some(m) => Some(m.parse::<TranslatorMode>().map_err(|e| e.to_string())?),
        None => None,
    };
    Ok((request, mode))
}

pub async fn query(State(state): State<Arc<AppState>>, body: Result<Bytes, BytesRejection>) -> Response {
    let body = match body {
        Ok(b) => b,
        Err(e) => return bad_request(e.body_text()),
    };
    let (request, mode) = match parse_request(&body) {
        Ok(r) => r,
        Err(message) => return bad_request(message),
    };
    let mode = mode.unwrap_or(state.default_mode);
    let session_id = request.session_id.clone().unwrap_or_else(|| uuid::Uuid::new_v4().to_string());

    let worker = Arc::clone(&state);
    let text = request.text.clone();
    let answer = match tokio::task::spawn_blocking(move || worker.engine.answer_with(&text, mode)).await {
        Ok(a) => a,
        Err(e) => {
            tracing::error!("answer task failed: {e}");
            return (StatusCode::INTERNAL_SERVER_ERROR, Json(json!({"error": "answer task failed"}))).into_response();
        }
    };
    let entry = HistoryEntry {
        text: request.text,
        status: answer.status,
        intent: answer.intent,
        answer_text: answer.text.clone(),
        cypher: answer.cypher.clone(),
    };
    state.sessions.lock().unwrap_or_else(|p| p.into_inner()).append(&session_id, entry);
    Json(QueryResponse::new(answer, session_id)).into_response()
}

pub async fn schema(State(state): State<Arc<AppState>>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], state.schema_json.clone()).into_response()
}

pub async fn history(State(state): State<Arc<AppState>>, params: Query<HistoryParams>) -> Response {
    let id = params.0.session_id.unwrap_or_default();
    let entries = state.sessions.lock().unwrap_or_else(|p| p.into_inner()).history(&id);
    Json(json!({"session_id": id, "entries": entries})).into_response()
}

pub async fn health(State(state): State<Arc<AppState>>) -> Response {
    let g = state.engine.graph();
    Json(json!({"status": "ok", "nodes": g.node_count(), "edges": g.edge_count()})).into_response()
}
