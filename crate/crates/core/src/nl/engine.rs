//! End-to-end question answering over an immutable graph.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::exemplars::{ExemplarBank, ExemplarError};
use super::format::{format_response, REJECTION};
use super::guard::guard;
use super::intent::{classify_intent, IntentCategory};
use super::lexicon::{Lexicon, LexiconError};
use super::normalize::{normalize, NormalizedQuery};
use super::prompt::{build_prompt, PromptError};
use super::remote::{translate_remote, RemoteConfig, RemoteError};
use super::translate::{translate_rule, Translation};
use crate::cypher::{execute, render_ast, CypherError, ResultTable, ValidatedQuery, Value};
use crate::domain::{build_graph, schema_summary, shipped_dataset, DomainDataset, SchemaDescriptor};
use crate::graph::{FrozenGraph, GraphError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TranslatorMode {
    #[default]
    Rule,
    Remote,
    /// Remote first; the rule translator covers remote errors and guard rejections.
    Fallback,
}

impl TranslatorMode {
    pub fn name(self) -> &'static str {
        match self {
            TranslatorMode::Rule => "rule",
            TranslatorMode::Remote => "remote",
            TranslatorMode::Fallback => "fallback",
        }
    }
}

impl fmt::Display for TranslatorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown translator mode {0:?} (expected rule, remote or fallback)")]
pub struct UnknownMode(pub String);

impl FromStr for TranslatorMode {
    type Err = UnknownMode;
    fn from_str(s: &str) -> Result<Self, UnknownMode> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rule" => Ok(TranslatorMode::Rule),
            "remote" => Ok(TranslatorMode::Remote),
            "fallback" | "remote-with-rule-fallback" => Ok(TranslatorMode::Fallback),
            _ => Err(UnknownMode(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnswerStatus {
    Answered,
    Unsupported,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Answer {
    pub status: AnswerStatus,
    pub intent: IntentCategory,
    pub cypher: Option<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub text: String,
    pub elapsed_ms: u64,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Exemplars(#[from] ExemplarError),
}

/// Lexicon, schema, graph and exemplar bank, fixed at construction.
pub struct Engine {
    dataset: DomainDataset,
    graph: FrozenGraph,
    schema: SchemaDescriptor,
    lexicon: Lexicon,
    bank: ExemplarBank,
    mode: TranslatorMode,
    remote: Option<RemoteConfig>,
}

enum Failure {
    Prompt(PromptError),
    Remote(RemoteError),
    Guard(CypherError),
    Execute(CypherError),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Prompt(e) => write!(f, "{e}"),
            Failure::Remote(e) => write!(f, "{e}"),
            Failure::Guard(e) => write!(f, "generated query rejected: {e}"),
            Failure::Execute(e) => write!(f, "query execution failed: {e}"),
        }
    }
}

enum Attempt {
    Unsupported,
    Ran(ValidatedQuery, ResultTable),
}

impl Engine {
    pub fn new(dataset: DomainDataset) -> Result<Engine, EngineError> {
        let graph = build_graph(&dataset)?;
        let schema = schema_summary(&dataset);
        let lexicon = Lexicon::shipped(&dataset, &schema)?;
        let bank = ExemplarBank::shipped()?;
        Ok(Engine { dataset, graph, schema, lexicon, bank, mode: TranslatorMode::Rule, remote: None })
    }

    pub fn shipped() -> Result<Engine, EngineError> {
        Engine::new(shipped_dataset())
    }

    pub fn with_mode(mut self, mode: TranslatorMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_remote(mut self, config: Option<RemoteConfig>) -> Self {
        self.remote = config;
        self
    }

    pub fn mode(&self) -> TranslatorMode {
        self.mode
    }

    pub fn dataset(&self) -> &DomainDataset {
        &self.dataset
    }

    pub fn graph(&self) -> &FrozenGraph {
        &self.graph
    }

    pub fn schema(&self) -> &SchemaDescriptor {
        &self.schema
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn bank(&self) -> &ExemplarBank {
        &self.bank
    }

    /// Guarded execution of raw query text.
    pub fn run_cypher(&self, text: &str) -> Result<ResultTable, CypherError> {
        let validated = guard(text, &self.schema)?;
        execute(&self.graph, validated.query())
    }

    pub fn answer(&self, text: &str) -> Answer {
        self.answer_with(text, self.mode)
    }

    pub fn answer_with(&self, text: &str, mode: TranslatorMode) -> Answer {
        let start = Instant::now();
        let mut answer = self.answer_inner(text, mode);
        answer.elapsed_ms = start.elapsed().as_millis() as u64;
        answer
    }

    fn answer_inner(&self, text: &str, mode: TranslatorMode) -> Answer {
        let q = match normalize(text, &self.lexicon) {
            Ok(q) => q,
            Err(e) => return error(IntentCategory::Unsupported, e.to_string()),
        };
        let intent = classify_intent(&q);
        if intent == IntentCategory::Unsupported {
            return unsupported(intent);
        }
        let outcome = match mode {
            TranslatorMode::Rule => self.attempt(self.rule(&q, intent)),
            TranslatorMode::Remote => self.remote(&q).and_then(|t| self.attempt(t)),
            TranslatorMode::Fallback => match self.remote(&q).and_then(|t| self.attempt(t)) {
                Err(Failure::Prompt(_) | Failure::Remote(_) | Failure::Guard(_)) => self.attempt(self.rule(&q, intent)),
                other => other,
            },
        };
        match outcome {
            Ok(Attempt::Unsupported) => unsupported(intent),
            Ok(Attempt::Ran(validated, table)) => Answer {
                status: AnswerStatus::Answered,
                intent,
                cypher: Some(render_ast(validated.query())),
                text: format_response(intent, &table, &self.schema),
                columns: table.columns,
                rows: table.rows,
                elapsed_ms: 0,
            },
            Err(f) => error(intent, f.to_string()),
        }
    }

    fn rule(&self, q: &NormalizedQuery, intent: IntentCategory) -> Translation {
        translate_rule(q, intent, &self.schema)
    }

    fn remote(&self, q: &NormalizedQuery) -> Result<Translation, Failure> {
        let config = self.remote.as_ref().ok_or(Failure::Remote(RemoteError::NotConfigured))?;
        let doc = build_prompt(&self.schema, &self.lexicon, &self.bank, q).map_err(Failure::Prompt)?;
        translate_remote(&doc, config).map_err(Failure::Remote)
    }

    fn attempt(&self, translation: Translation) -> Result<Attempt, Failure> {
        let Translation::Cypher(text) = translation else { return Ok(Attempt::Unsupported) };
        let validated = guard(&text, &self.schema).map_err(Failure::Guard)?;
        let table = execute(&self.graph, validated.query()).map_err(Failure::Execute)?;
        Ok(Attempt::Ran(validated, table))
    }
}

fn unsupported(intent: IntentCategory) -> Answer {
    Answer {
        status: AnswerStatus::Unsupported,
        intent,
        cypher: None,
        columns: Vec::new(),
        rows: Vec::new(),
        text: REJECTION.to_string(),
        elapsed_ms: 0,
    }
}

fn error(intent: IntentCategory, message: String) -> Answer {
    Answer { status: AnswerStatus::Error, intent, cypher: None, columns: Vec::new(), rows: Vec::new(), text: message, elapsed_ms: 0 }
}
