//! In-process HTTP checks against the service router.

use std::sync::Arc;

use amkg_core::nl::{Engine, TranslatorMode};
use amkg_service::{router, AppState};
use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use serde_json::{json, Value as Json};
use tower::ServiceExt;

pub const EBW_DED_QUESTION: &str = "Which alloys can be printed by Electron Beam Wire DED?";
pub const NICKEL_POST_QUESTION: &str = "Which processes for nickel alloys need both powder removal and heat treatment?";
pub const MECHANICAL_QUESTION: &str =
    "How do the anisotropic mechanical properties of Ti-6Al-4V vary across build orientations and post-processing treatments?";
pub const EXPECTED_REJECTION: &str = "Sorry, the current knowledge graph does not support this type of query.";

pub fn test_app() -> Router {
    let state = Arc::new(AppState::new(Engine::shipped().expect("engine"), TranslatorMode::Rule));
    router(state, None)
}

pub async fn send(app: &Router, request: Request<Body>) -> (StatusCode, Vec<u8>) {
    let response = app.clone().oneshot(request).await.expect("infallible router");
    let status = response.status();
    let body = to_bytes(response.into_body(), usize::MAX).await.expect("body");
    (status, body.to_vec())
}

pub async fn post_raw(app: &Router, body: impl Into<Body>) -> (StatusCode, Vec<u8>) {
    let request = Request::post("/api/query").header("content-type", "application/json").body(body.into()).unwrap();
    send(app, request).await
}

pub async fn post_json(app: &Router, body: Json) -> (StatusCode, Json) {
    let (status, bytes) = post_raw(app, body.to_string()).await;
    (status, serde_json::from_slice(&bytes).unwrap_or(Json::Null))
}

pub async fn get_json(app: &Router, uri: &str) -> (StatusCode, Json) {
    let (status, bytes) = send(app, Request::get(uri).body(Body::empty()).unwrap()).await;
    (status, serde_json::from_slice(&bytes).unwrap_or(Json::Null))
}

fn without_elapsed(mut body: Json) -> Json {
    if let Some(map) = body.as_object_mut() {
        map.remove("elapsed_ms");
    }
    body
}

/// Scenario statuses, size limit, and a concurrent burst of identical requests.
pub async fn check_service_conformance() -> Result<String, String> {
    let app = test_app();
    for (text, expected) in
        [(EBW_DED_QUESTION, "answered"), (NICKEL_POST_QUESTION, "answered"), (MECHANICAL_QUESTION, "unsupported")]
    {
        let (status, body) = post_json(&app, json!({"text": text, "translator_mode": "rule"})).await;
        if status != StatusCode::OK || body["status"] != expected {
            return Err(format!("{text:?}: HTTP {status}, status {}", body["status"]));
        }
        if expected == "answered" && body["rows"].as_array().is_none_or(Vec::is_empty) {
            return Err(format!("{text:?}: no rows"));
        }
        if expected == "unsupported" && body["answer_text"] != EXPECTED_REJECTION {
            return Err(format!("{text:?}: answer_text {}", body["answer_text"]));
        }
    }

    let (status, _) = post_json(&app, json!({"text": "x".repeat(5000)})).await;
    if status != StatusCode::BAD_REQUEST {
        return Err(format!("oversize text: HTTP {status}"));
    }

    let body = json!({"text": EBW_DED_QUESTION, "session_id": "burst", "translator_mode": "rule"}).to_string();
    let tasks: Vec<_> = (0..50)
        .map(|_| {
            let app = app.clone();
            let body = body.clone();
            tokio::spawn(async move { post_raw(&app, body).await })
        })
        .collect();
    let mut bodies = Vec::new();
    for t in tasks {
        let (status, bytes) = t.await.map_err(|e| e.to_string())?;
        if status != StatusCode::OK {
            return Err(format!("burst request: HTTP {status}"));
        }
        let parsed: Json = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
        bodies.push(without_elapsed(parsed));
    }
    if bodies.iter().any(|b| *b != bodies[0]) {
        return Err("burst responses differ".into());
    }
    let (_, history) = get_json(&app, "/api/history?session_id=burst").await;
    let entries = history["entries"].as_array().map_or(0, Vec::len);
    if entries != 50 {
        return Err(format!("burst session holds {entries} history entries"));
    }
    Ok(format!("{} identical burst bodies", bodies.len()))
}
