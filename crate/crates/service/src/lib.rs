//! HTTP facade over the question-answering engine.
//!
//! Routes: `POST /api/query`, `GET /api/schema`, `GET /api/history`,
//! `GET /healthz`, and static files at `/`.

pub mod api;
pub mod sessions;

use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use amkg_core::domain::{load_seed_file, shipped_dataset, LoadError};
use amkg_core::nl::{Engine, EngineError, RemoteConfig, TranslatorMode, UnknownMode};
use axum::extract::DefaultBodyLimit;
use axum::response::Html;
use axum::routing::{get, post};
use axum::Router;
use thiserror::Error;
use tower_http::services::ServeDir;

pub use api::{AppState, QueryRequest, QueryResponse, MAX_TEXT_CHARS};

pub const ENV_BIND_ADDR: &str = "AMKG_BIND_ADDR";
pub const ENV_SEED_PATH: &str = "AMKG_SEED_PATH";
pub const ENV_TRANSLATOR_MODE: &str = "AMKG_TRANSLATOR_MODE";
pub const ENV_STATIC_DIR: &str = "AMKG_STATIC_DIR";
pub const DEFAULT_BIND_ADDR: &str = "127.0.0.1:8080";

/// Request bodies above this size are refused before parsing.
const BODY_LIMIT: usize = 256 * 1024;
const PLACEHOLDER_PAGE: &str = include_str!("../static/index.html");

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Seed(#[from] LoadError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{ENV_TRANSLATOR_MODE}: {0}")]
    Mode(#[from] UnknownMode),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: String, source: io::Error },
    #[error("server error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub bind: String,
    pub seed_path: Option<PathBuf>,
    pub mode: TranslatorMode,
    pub static_dir: Option<PathBuf>,
    pub remote: Option<RemoteConfig>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: DEFAULT_BIND_ADDR.into(),
            seed_path: None,
            mode: TranslatorMode::Rule,
            static_dir: None,
            remote: None,
        }
    }
}

fn env_var(name: &str) -> Option<String> {
    std::env::var(name).ok().filter(|v| !v.trim().is_empty())
}

impl ServiceConfig {
    pub fn from_env() -> Result<Self, ServiceError> {
        Ok(ServiceConfig {
            bind: env_var(ENV_BIND_ADDR).unwrap_or_else(|| DEFAULT_BIND_ADDR.into()),
            seed_path: env_var(ENV_SEED_PATH).map(PathBuf::from),
            mode: env_var(ENV_TRANSLATOR_MODE).map(|m| m.parse()).transpose()?.unwrap_or_default(),
            static_dir: env_var(ENV_STATIC_DIR).map(PathBuf::from),
            remote: RemoteConfig::from_env().ok(),
        })
    }
}

/// Engine over the seed at `seed_path`, or the shipped seed.
pub fn load_engine(seed_path: Option<&Path>) -> Result<Engine, ServiceError> {
    let dataset = match seed_path {
        Some(p) => load_seed_file(p)?,
        None => shipped_dataset(),
    };
    Ok(Engine::new(dataset)?)
}

pub fn router(state: Arc<AppState>, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/query", post(api::query))
        .route("/api/schema", get(api::schema))
        .route("/api/history", get(api::history))
        .route("/healthz", get(api::health))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state);
    match static_dir.filter(|d| d.is_dir()) {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(PLACEHOLDER_PAGE) })),
    }
}

pub fn app(config: &ServiceConfig) -> Result<Router, ServiceError> {
    let engine = load_engine(config.seed_path.as_deref())?.with_remote(config.remote.clone());
    let state = Arc::new(AppState::new(engine, config.mode));
    Ok(router(state, config.static_dir.as_deref()))
}

/// Serves until ctrl-c.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let app = app(&config)?;
    let listener = tokio::net::TcpListener::bind(&config.bind)
        .await
        .map_err(|source| ServiceError::Bind { addr: config.bind.clone(), source })?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
