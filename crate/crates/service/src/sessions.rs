//! In-memory per-session transcripts.

use std::collections::{HashMap, VecDeque};
use std::time::{SystemTime, UNIX_EPOCH};

use amkg_core::nl::{AnswerStatus, IntentCategory};
use serde::Serialize;

/// Entries kept per session; older ones are evicted first.
pub const HISTORY_CAP: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistoryEntry {
    pub text: String,
    pub status: AnswerStatus,
    pub intent: IntentCategory,
    pub answer_text: String,
    pub cypher: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub created_at: u64,
    pub history: VecDeque<HistoryEntry>,
}

#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: HashMap<String, Session>,
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn append(&mut self, session_id: &str, entry: HistoryEntry) {
        let session = self.sessions.entry(session_id.to_string()).or_insert_with(|| Session {
            created_at: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            history: VecDeque::new(),
        });
        if session.history.len() == HISTORY_CAP {
            session.history.pop_front();
        }
        session.history.push_back(entry);
    }

    pub fn get(&self, session_id: &str) -> Option<&Session> {
        self.sessions.get(session_id)
    }

    /// History in arrival order; empty for an unknown session.
    pub fn history(&self, session_id: &str) -> Vec<HistoryEntry> {
        self.sessions.get(session_id).map(|s| s.history.iter().cloned().collect()).unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.sessions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.is_empty()
    }
}
