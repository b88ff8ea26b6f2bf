//! Few-shot prompt assembly under a character budget.

use std::fmt::Write;

use thiserror::Error;

use super::exemplars::{Exemplar, ExemplarBank};
use super::intent::IntentCategory;
use super::lexicon::Lexicon;
use super::normalize::NormalizedQuery;
use crate::domain::SchemaDescriptor;

pub const DEFAULT_PROMPT_BUDGET: usize = 24_000;
/// Exemplars kept per category however tight the budget.
pub const MIN_KEPT_PER_CATEGORY: usize = 3;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("prompt needs at least {required} characters, budget is {budget}")]
    BudgetImpossible { required: usize, budget: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptDocument {
    pub system: String,
    pub exemplars: Vec<Exemplar>,
    pub user: String,
    pub budget: usize,
}

impl PromptDocument {
    /// Instructions, schema overview and exemplars: the system chat message.
    pub fn system_message(&self) -> String {
        let mut out = self.system.clone();
        out.push_str("\nExamples:\n");
        for e in &self.exemplars {
            let _ = write!(out, "\nQ: {}\nA: {}\n", e.question, e.cypher);
        }
        out
    }

    pub fn user_message(&self) -> &str {
        &self.user
    }

    /// Character count of both messages.
    pub fn len(&self) -> usize {
        self.system_message().chars().count() + self.user.chars().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn positive_count(&self) -> usize {
        self.exemplars.iter().filter(|e| !e.is_negative()).count()
    }
}

const INSTRUCTIONS: &str = "\
You translate questions about metal additive manufacturing into Cypher queries over the knowledge graph described below.
Reply with a single read-only Cypher query and nothing else. Use MATCH, WHERE, RETURN, ORDER BY and LIMIT only.
Use only the node labels, relationship types, properties and entity names listed here.
Quantities are stored in millimetres (mm) and cubic centimetres per hour (cc/hr); convert thresholds before comparing.
If the graph cannot answer the question, reply with exactly UNSUPPORTED.
";

/// Instructions, labels, relationships, units, entity names and synonyms.
pub fn system_section(schema: &SchemaDescriptor, lexicon: &Lexicon) -> String {
    let mut out = String::from(INSTRUCTIONS);
    out.push_str("\nNode labels:\n");
    for l in &schema.labels {
        let props: Vec<String> = l.properties.iter().map(|p| format!("{}: {}", p.name, p.kind.name())).collect();
        let _ = writeln!(out, "- {} {{{}}}", l.label, props.join(", "));
    }
    out.push_str("\nRelationships:\n");
    for r in &schema.relationships {
        let props = if r.properties.is_empty() {
            String::new()
        } else {
            let p: Vec<String> = r.properties.iter().map(|p| format!("{}: {}", p.name, p.kind.name())).collect();
            format!(" {{{}}}", p.join(", "))
        };
        let _ = writeln!(out, "- ({})-[:{}{props}]->({})", r.from_label, r.rel_type, r.to_label);
    }
    out.push_str("\nUnits:\n");
    for l in &schema.labels {
        for p in &l.properties {
            if let Some(u) = &p.unit {
                let _ = writeln!(out, "- {}.{}: {u}", l.label, p.name);
            }
        }
    }
    out.push_str("\nEntities:\n");
    for l in &schema.labels {
        let _ = writeln!(out, "- {}: {}", l.label, l.entities.join("; "));
    }
    out.push_str("\nSynonyms (surface form -> entity name):\n");
    for (surface, target) in lexicon.synonyms() {
        let _ = writeln!(out, "- {surface} -> {}", target.name);
    }
    out
}

/// The normalized question followed by the original text as a comment line.
pub fn user_section(q: &NormalizedQuery) -> String {
    format!("{}\n// original: {}", q.rendered(), q.original.trim())
}

pub fn build_prompt(
    schema: &SchemaDescriptor,
    lexicon: &Lexicon,
    bank: &ExemplarBank,
    q: &NormalizedQuery,
) -> Result<PromptDocument, PromptError> {
    build_prompt_with_budget(schema, lexicon, bank, q, DEFAULT_PROMPT_BUDGET)
}

/// Drops positive exemplars round-robin across categories, last first,
/// until the document fits. Negative exemplars are never dropped.
pub fn build_prompt_with_budget(
    schema: &SchemaDescriptor,
    lexicon: &Lexicon,
    bank: &ExemplarBank,
    q: &NormalizedQuery,
    budget: usize,
) -> Result<PromptDocument, PromptError> {
    let mut kept = vec![true; bank.all().len()];
    let assemble = |kept: &[bool]| PromptDocument {
        system: system_section(schema, lexicon),
        exemplars: bank.all().iter().zip(kept).filter(|(_, k)| **k).map(|(e, _)| e.clone()).collect(),
        user: user_section(q),
        budget,
    };
    let mut doc = assemble(&kept);
    let mut cursor = 0;
    while doc.len() > budget {
        let mut dropped = false;
        for step in 0..IntentCategory::PRECEDENCE.len() {
            let category = IntentCategory::PRECEDENCE[(cursor + step) % IntentCategory::PRECEDENCE.len()];
            let members: Vec<usize> = (0..kept.len()).filter(|&i| kept[i] && bank.all()[i].category == category).collect();
            if members.len() > MIN_KEPT_PER_CATEGORY {
                kept[*members.last().expect("non-empty")] = false;
                cursor = (cursor + step + 1) % IntentCategory::PRECEDENCE.len();
                dropped = true;
                break;
            }
        }
        if !dropped {
            return Err(PromptError::BudgetImpossible { required: doc.len(), budget });
        }
        doc = assemble(&kept);
    }
    Ok(doc)
}
