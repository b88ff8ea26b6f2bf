//! Chat-completions client for LLM translation.

use std::io;
use std::time::Duration;

use serde_json::{json, Value as Json};
use thiserror::Error;

use super::prompt::PromptDocument;
use super::translate::Translation;

pub const ENV_BASE_URL: &str = "AMKG_LLM_BASE_URL";
pub const ENV_API_KEY: &str = "AMKG_LLM_API_KEY";
pub const ENV_MODEL: &str = "AMKG_LLM_MODEL";
pub const DEFAULT_MODEL: &str = "default";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RemoteError {
    #[error("remote translator not configured: {ENV_BASE_URL} is unset")]
    NotConfigured,
    #[error("remote translator timed out after {0:?}")]
    Timeout(Duration),
    #[error("remote translator unreachable: {0}")]
    Transport(String),
    #[error("remote translator reply malformed: {0}")]
    MalformedReply(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemoteConfig {
    pub base_url: String,
    pub api_key: Option<String>,
    pub model: String,
    pub timeout: Duration,
}

impl RemoteConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        RemoteConfig { base_url: base_url.into(), api_key: None, model: DEFAULT_MODEL.into(), timeout: DEFAULT_TIMEOUT }
    }

    pub fn from_env() -> Result<Self, RemoteError> {
        let base = std::env::var(ENV_BASE_URL).ok().filter(|v| !v.trim().is_empty()).ok_or(RemoteError::NotConfigured)?;
        let mut config = RemoteConfig::new(base);
        config.api_key = std::env::var(ENV_API_KEY).ok().filter(|v| !v.is_empty());
        if let Ok(model) = std::env::var(ENV_MODEL) {
            if !model.is_empty() {
                config.model = model;
            }
        }
        Ok(config)
    }

    pub fn endpoint(&self) -> String {
        format!("{}/v1/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

pub fn request_body(doc: &PromptDocument, model: &str) -> Json {
    json!({
        "model": model,
        "messages": [
            {"role": "system", "content": doc.system_message()},
            {"role": "user", "content": doc.user_message()},
        ],
        "temperature": 0,
    })
}

/// Removes surrounding whitespace and a Markdown code fence, if any.
pub fn strip_fences(reply: &str) -> &str {
    let t = reply.trim();
    let Some(rest) = t.strip_prefix("```") else { return t };
    let body = match rest.find('\n') {
        Some(i) => &rest[i + 1..],
        None => rest,
    };
    body.trim_end().strip_suffix("```").unwrap_or(body).trim()
}

/// Maps reply text to a translation; the unsupported token is case-insensitive.
pub fn interpret_reply(reply: &str) -> Result<Translation, RemoteError> {
    let text = strip_fences(reply);
    if text.is_empty() {
        return Err(RemoteError::MalformedReply("empty reply".into()));
    }
    let token = text.trim_end_matches('.').trim().to_ascii_lowercase();
    if token == "unsupported" || token == "unsupported query" {
        return Ok(Translation::Unsupported);
    }
    Ok(Translation::Cypher(text.to_string()))
}

fn is_timeout(err: &(dyn std::error::Error + 'static)) -> bool {
    let mut cur = Some(err);
    while let Some(e) = cur {
        if let Some(io) = e.downcast_ref::<io::Error>() {
            if matches!(io.kind(), io::ErrorKind::TimedOut | io::ErrorKind::WouldBlock) {
                return true;
            }
        }
        cur = e.source();
    }
    false
}

/// Sends the prompt and interprets `choices[0].message.content`.
pub fn translate_remote(doc: &PromptDocument, config: &RemoteConfig) -> Result<Translation, RemoteError> {
    let agent = ureq::AgentBuilder::new().timeout(config.timeout).build();
    let mut request = agent.post(&config.endpoint()).set("Content-Type", "application/json");
    if let Some(key) = &config.api_key {
        request = request.set("Authorization", &format!("Bearer {key}"));
    }
    let response = match request.send_json(request_body(doc, &config.model)) {
        Ok(r) => r,
        Err(ureq::Error::Status(code, _)) => return Err(RemoteError::Transport(format!("HTTP status {code}"))),
        Err(ureq::Error::Transport(t)) => {
            return Err(if is_timeout(&t) { RemoteError::Timeout(config.timeout) } else { RemoteError::Transport(t.to_string()) })
        }
    };
    let body = response.into_string().map_err(|e| {
        if matches!(e.kind(), io::ErrorKind::TimedOut | io::ErrorKind::WouldBlock) {
            RemoteError::Timeout(config.timeout)
        } else {
            RemoteError::Transport(e.to_string())
        }
    })?;
    if body.trim().is_empty() {
        return Err(RemoteError::MalformedReply("empty body".into()));
    }
    let value: Json = serde_json::from_str(&body).map_err(|e| RemoteError::MalformedReply(e.to_string()))?;
    let content = value
        .pointer("/choices/0/message/content")
        .and_then(Json::as_str)
        .ok_or_else(|| RemoteError::MalformedReply("missing choices[0].message.content".into()))?;
    interpret_reply(content)
}
