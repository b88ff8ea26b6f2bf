//! Curated question/Cypher pairs for few-shot prompting.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::intent::IntentCategory;

pub const SHIPPED_EXEMPLARS: &str = include_str!("../../data/exemplars.json");
pub const UNSUPPORTED_TOKEN: &str = "UNSUPPORTED";
pub const MIN_POSITIVES_PER_CATEGORY: usize = 6;
pub const MIN_NEGATIVES: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exemplar {
    pub category: IntentCategory,
    pub question: String,
    pub cypher: String,
}

impl Exemplar {
    pub fn is_negative(&self) -> bool {
        self.category == IntentCategory::Unsupported
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ExemplarError {
    #[error("exemplar bank: {0}")]
    Format(String),
    #[error("exemplar {index}: negative examples must answer {UNSUPPORTED_TOKEN}")]
    NegativeWithQuery { index: usize },
    #[error("exemplar {index}: positive example answers {UNSUPPORTED_TOKEN}")]
    PositiveWithoutQuery { index: usize },
    #[error("{category}: {found} examples, need at least {required}")]
    Coverage { category: IntentCategory, found: usize, required: usize },
}

#[derive(Debug, Clone)]
pub struct ExemplarBank {
    exemplars: Vec<Exemplar>,
}

impl ExemplarBank {
    pub fn shipped() -> Result<ExemplarBank, ExemplarError> {
        ExemplarBank::from_json(SHIPPED_EXEMPLARS)
    }

    pub fn from_json(text: &str) -> Result<ExemplarBank, ExemplarError> {
        let exemplars: Vec<Exemplar> = serde_json::from_str(text).map_err(|e| ExemplarError::Format(e.to_string()))?;
        ExemplarBank::new(exemplars)
    }

    /// Checks the negative/positive shape and per-category coverage.
    pub fn new(exemplars: Vec<Exemplar>) -> Result<ExemplarBank, ExemplarError> {
        for (index, e) in exemplars.iter().enumerate() {
            let unsupported = e.cypher.trim() == UNSUPPORTED_TOKEN;
            if e.is_negative() && !unsupported {
                return Err(ExemplarError::NegativeWithQuery { index });
            }
            if !e.is_negative() && unsupported {
                return Err(ExemplarError::PositiveWithoutQuery { index });
            }
        }
        let bank = ExemplarBank { exemplars };
        for category in IntentCategory::PRECEDENCE {
            let found = bank.in_category(category).count();
            if found < MIN_POSITIVES_PER_CATEGORY {
                return Err(ExemplarError::Coverage { category, found, required: MIN_POSITIVES_PER_CATEGORY });
            }
        }
        let found = bank.negatives().count();
        if found < MIN_NEGATIVES {
            return Err(ExemplarError::Coverage { category: IntentCategory::Unsupported, found, required: MIN_NEGATIVES });
        }
        Ok(bank)
    }

    pub fn all(&self) -> &[Exemplar] {
        &self.exemplars
    }

    pub fn in_category(&self, category: IntentCategory) -> impl Iterator<Item = &Exemplar> {
        self.exemplars.iter().filter(move |e| e.category == category)
    }

    pub fn positives(&self) -> impl Iterator<Item = &Exemplar> {
        self.exemplars.iter().filter(|e| !e.is_negative())
    }

    pub fn negatives(&self) -> impl Iterator<Item = &Exemplar> {
        self.exemplars.iter().filter(|e| e.is_negative())
    }
}
