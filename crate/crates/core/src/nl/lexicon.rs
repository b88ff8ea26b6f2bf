//! Surface-form vocabulary: entity synonyms, label nouns, units, comparison
//! and dimension words, intent cues, and out-of-scope triggers.

use std::collections::{BTreeMap, HashMap};

use serde::Deserialize;
use thiserror::Error;

use crate::cypher::ast::CompareOp;
use crate::domain::{labels, DomainDataset, SchemaDescriptor};

pub const SHIPPED_LEXICON: &str = include_str!("../../data/lexicon.json");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LexiconError {
    #[error("lexicon format error: {0}")]
    Format(String),
    #[error("surface form {surface:?} maps to both {first} and {second}")]
    DuplicateSurface { surface: String, first: String, second: String },
    #[error("lexicon entry {surface:?} names {label} {name:?}, which is not in the schema")]
    UnknownEntity { surface: String, name: String, label: String },
    #[error("unknown key {0:?} in lexicon")]
    UnknownKey(String),
}

/// Splits text into case-folded tokens. Edge punctuation is stripped; `-`,
/// `.`, `/`, and `+` are kept inside tokens so names like `Ti-6Al-4V`,
/// `0.5`, and `cc/hr` stay whole. Commas inside digit groups are dropped.
pub fn tokenize_text(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase().replace(['’', '‘'], "'");
    let chars: Vec<char> = lowered.chars().collect();
    let mut cleaned = String::with_capacity(lowered.len());
    for (i, &c) in chars.iter().enumerate() {
        let digit_at = |j: Option<usize>| j.and_then(|j| chars.get(j)).is_some_and(|c| c.is_ascii_digit());
        match c {
            ',' if digit_at(i.checked_sub(1)) && digit_at(Some(i + 1)) => {}
            ',' | ';' | '(' | ')' | '?' | '!' | ':' | '"' | '[' | ']' | '{' | '}' | '*' => cleaned.push(' '),
            c => cleaned.push(c),
        }
    }
    let mut out = Vec::new();
    for raw in cleaned.split_whitespace() {
        let mut t = raw.trim_matches(|c: char| matches!(c, '.' | '\'' | '-' | '/' | '+' | ',' | '`'));
        if let Some(stripped) = t.strip_suffix("'s") {
            t = stripped;
        }
        if t.is_empty() {
            continue;
        }
        // `>=50` and `≥50` split into operator and number
        let op_len = [">=", "<=", "≥", "≤", ">", "<", "="]
            .iter()
            .find(|op| t.starts_with(**op) && t[op.len()..].starts_with(|c: char| c.is_ascii_digit()))
            .map(|op| op.len());
        match op_len {
            Some(n) => {
                out.push(t[..n].to_string());
                out.push(t[n..].to_string());
            }
            None => out.push(t.to_string()),
        }
    }
    out
}

/// Token-sequence dictionary with greedy leftmost-longest matching.
#[derive(Debug, Clone)]
pub struct PhraseMap<T> {
    map: HashMap<Vec<String>, T>,
    max_len: usize,
}

impl<T> Default for PhraseMap<T> {
    fn default() -> Self {
        PhraseMap { map: HashMap::new(), max_len: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl<T> PhraseMap<T> {
    /// Returns the existing value if the phrase is already present.
    pub fn insert(&mut self, phrase: &str, value: T) -> Option<&T> {
        let key = tokenize_text(phrase);
        if key.is_empty() {
            return None;
        }
        if self.map.contains_key(&key) {
            return self.map.get(&key);
        }
        self.max_len = self.max_len.max(key.len());
        self.map.insert(key, value);
        None
    }

    pub fn get_tokens(&self, tokens: &[String]) -> Option<&T> {
        self.map.get(tokens)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    /// Longest phrase starting exactly at `start`, using only unmasked tokens.
    pub fn match_at(&self, tokens: &[String], start: usize, mask: &[bool]) -> Option<(Span, &T)> {
        let avail = tokens.len().saturating_sub(start);
        for len in (1..=self.max_len.min(avail)).rev() {
            let end = start + len;
            if mask[start..end].iter().any(|m| *m) {
                continue;
            }
            if let Some(v) = self.map.get(&tokens[start..end]) {
                return Some((Span { start, end }, v));
            }
        }
        None
    }

    /// Non-overlapping matches, scanning left to right and taking the
    /// longest phrase at each position.
    pub fn find_all(&self, tokens: &[String], mask: &[bool]) -> Vec<(Span, &T)> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            match self.match_at(tokens, i, mask) {
                Some((span, v)) => {
                    out.push((span, v));
                    i = span.end;
                }
                None => i += 1,
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityRef {
    pub name: String,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitKind {
    Length,
    Rate,
}

impl UnitKind {
    pub fn symbol(self) -> &'static str {
        match self {
            UnitKind::Length => "mm",
            UnitKind::Rate => "cc/hr",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unit {
    pub kind: UnitKind,
    /// Multiplier to mm or cc/hr.
    pub factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    BuildX,
    BuildY,
    BuildZ,
    BuildVolume,
    Resolution,
    Rate,
}

impl Dimension {
    /// Process properties constrained by this dimension.
    pub fn properties(self) -> &'static [&'static str] {
        match self {
            Dimension::BuildX => &["build_x_mm"],
            Dimension::BuildY => &["build_y_mm"],
            Dimension::BuildZ => &["build_z_mm"],
            Dimension::BuildVolume => &["build_x_mm", "build_y_mm", "build_z_mm"],
            Dimension::Resolution => &["feature_resolution_mm"],
            Dimension::Rate => &["deposition_rate_cc_hr"],
        }
    }

    pub fn unit_kind(self) -> UnitKind {
        match self {
            Dimension::Rate => UnitKind::Rate,
            _ => UnitKind::Length,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Comparison {
    pub op: CompareOp,
    /// Written after the number ("50 mm or more").
    pub trailing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CueKind {
    Print,
    Post,
    Feedstock,
    Size,
    Count,
    Group,
    List,
    Synonym,
    Abbreviation,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SynonymEntry {
    surface: String,
    name: String,
    label: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitEntry {
    surface: String,
    kind: String,
    factor: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LexiconFile {
    entity_synonyms: Vec<SynonymEntry>,
    label_terms: BTreeMap<String, Vec<String>>,
    units: Vec<UnitEntry>,
    out_of_scope: Vec<String>,
    comparison_terms: BTreeMap<String, Vec<String>>,
    dimension_terms: BTreeMap<String, Vec<String>>,
    superlative_terms: BTreeMap<String, Vec<String>>,
    resolution_superlatives: BTreeMap<String, Vec<String>>,
    cues: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    pub(crate) entities: PhraseMap<EntityRef>,
    pub(crate) label_terms: PhraseMap<String>,
    pub(crate) units: PhraseMap<Unit>,
    pub(crate) comparisons: PhraseMap<Comparison>,
    pub(crate) dimensions: PhraseMap<Dimension>,
    /// `true` for "highest"-type words.
    pub(crate) superlatives: PhraseMap<bool>,
    /// Superlative word -> ascending order when applied to feature resolution.
    pub(crate) resolution_order: PhraseMap<bool>,
    pub(crate) cues: Vec<(CueKind, PhraseMap<()>)>,
    pub(crate) out_of_scope_words: Vec<String>,
    pub(crate) out_of_scope_phrases: PhraseMap<()>,
    /// (surface, canonical) pairs other than canonical names, for prompts.
    synonyms: Vec<(String, EntityRef)>,
}

impl Lexicon {
    pub fn shipped(dataset: &DomainDataset, schema: &SchemaDescriptor) -> Result<Lexicon, LexiconError> {
        Lexicon::from_json(SHIPPED_LEXICON, dataset, schema)
    }

    /// Combines schema entity names, seed synonyms and abbreviations, and
    /// the lexicon document. Conflicting surface forms are an error.
    pub fn from_json(text: &str, dataset: &DomainDataset, schema: &SchemaDescriptor) -> Result<Lexicon, LexiconError> {
        let file: LexiconFile = serde_json::from_str(text).map_err(|e| LexiconError::Format(e.to_string()))?;

        let mut entities: PhraseMap<EntityRef> = PhraseMap::default();
        let mut synonyms = Vec::new();
        let mut add = |surface: &str, target: EntityRef, canonical: bool| -> Result<(), LexiconError> {
            if !schema.entities(&target.label).iter().any(|e| *e == target.name) {
                return Err(LexiconError::UnknownEntity {
                    surface: surface.to_string(),
                    name: target.name,
                    label: target.label,
                });
            }
            if let Some(existing) = entities.insert(surface, target.clone()) {
                if *existing != target {
                    return Err(LexiconError::DuplicateSurface {
                        surface: surface.to_string(),
                        first: format!("{} {:?}", existing.label, existing.name),
                        second: format!("{} {:?}", target.label, target.name),
                    });
                }
                return Ok(());
            }
            if !canonical {
                synonyms.push((surface.to_string(), target));
            }
            Ok(())
        };
        let entity = |name: &str, label: &str| EntityRef { name: name.to_string(), label: label.to_string() };

        for l in &schema.labels {
            for name in &l.entities {
                add(name, entity(name, &l.label), true)?;
            }
        }
        for m in &dataset.materials {
            for s in &m.synonyms {
                add(s, entity(&m.name, labels::MATERIAL), false)?;
            }
        }
        for p in &dataset.processes {
            add(&p.abbreviation, entity(&p.name, labels::PROCESS), false)?;
        }
        for s in &file.entity_synonyms {
            add(&s.surface, entity(&s.name, &s.label), false)?;
        }

        let mut label_terms = PhraseMap::default();
        for (label, terms) in &file.label_terms {
            if !schema.labels.iter().any(|l| &l.label == label) {
                return Err(LexiconError::UnknownKey(label.clone()));
            }
            for t in terms {
                label_terms.insert(t, label.clone());
            }
        }

        let mut units = PhraseMap::default();
        for u in &file.units {
            let kind = match u.kind.as_str() {
                "length" => UnitKind::Length,
                "rate" => UnitKind::Rate,
                other => return Err(LexiconError::UnknownKey(other.to_string())),
            };
            units.insert(&u.surface, Unit { kind, factor: u.factor });
        }

        let mut comparisons = PhraseMap::default();
        for (key, terms) in &file.comparison_terms {
            let (op, trailing) = match key.as_str() {
                "ge" => (CompareOp::Ge, false),
                "le" => (CompareOp::Le, false),
                "gt" => (CompareOp::Gt, false),
                "lt" => (CompareOp::Lt, false),
                "eq" => (CompareOp::Eq, false),
                "ge_after" => (CompareOp::Ge, true),
                "le_after" => (CompareOp::Le, true),
                other => return Err(LexiconError::UnknownKey(other.to_string())),
            };
            for t in terms {
                comparisons.insert(t, Comparison { op, trailing });
            }
        }

        let mut dimensions = PhraseMap::default();
        for (key, terms) in &file.dimension_terms {
            let d = match key.as_str() {
                "build_x" => Dimension::BuildX,
                "build_y" => Dimension::BuildY,
                "build_z" => Dimension::BuildZ,
                "build_volume" => Dimension::BuildVolume,
                "resolution" => Dimension::Resolution,
                "rate" => Dimension::Rate,
                other => return Err(LexiconError::UnknownKey(other.to_string())),
            };
            for t in terms {
                dimensions.insert(t, d);
            }
        }

        let mut superlatives = PhraseMap::default();
        for (key, terms) in &file.superlative_terms {
            let high = match key.as_str() {
                "high" => true,
                "low" => false,
                other => return Err(LexiconError::UnknownKey(other.to_string())),
            };
            for t in terms {
                superlatives.insert(t, high);
            }
        }
        let mut resolution_order = PhraseMap::default();
        for (key, terms) in &file.resolution_superlatives {
            let asc = match key.as_str() {
                "asc" => true,
                "desc" => false,
                other => return Err(LexiconError::UnknownKey(other.to_string())),
            };
            for t in terms {
                resolution_order.insert(t, asc);
                // resolution-only words ("finest") are superlatives too
                superlatives.insert(t, !asc);
            }
        }

        let mut cues = Vec::new();
        for (key, terms) in &file.cues {
            let kind = match key.as_str() {
                "print" => CueKind::Print,
                "post" => CueKind::Post,
                "feedstock" => CueKind::Feedstock,
                "size" => CueKind::Size,
                "count" => CueKind::Count,
                "group" => CueKind::Group,
                "list" => CueKind::List,
                "synonym" => CueKind::Synonym,
                "abbreviation" => CueKind::Abbreviation,
                other => return Err(LexiconError::UnknownKey(other.to_string())),
            };
            let mut map = PhraseMap::default();
            for t in terms {
                map.insert(t, ());
            }
            cues.push((kind, map));
        }
        cues.sort_by_key(|(k, _)| *k);

        let mut out_of_scope_words = Vec::new();
        let mut out_of_scope_phrases = PhraseMap::default();
        for t in &file.out_of_scope {
            let toks = tokenize_text(t);
            if toks.len() == 1 {
                out_of_scope_words.push(toks[0].clone());
            } else {
                out_of_scope_phrases.insert(t, ());
            }
        }

        synonyms.sort_by(|a, b| (&a.1.label, &a.1.name, &a.0).cmp(&(&b.1.label, &b.1.name, &b.0)));
        Ok(Lexicon {
            entities,
            label_terms,
            units,
            comparisons,
            dimensions,
            superlatives,
            resolution_order,
            cues,
            out_of_scope_words,
            out_of_scope_phrases,
            synonyms,
        })
    }

    /// Resolves a single surface form, if it is one.
    pub fn resolve(&self, surface: &str) -> Option<&EntityRef> {
        self.entities.get_tokens(&tokenize_text(surface))
    }

    /// Non-canonical surface forms with their targets, sorted by label, name, surface.
    pub fn synonyms(&self) -> &[(String, EntityRef)] {
        &self.synonyms
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }
}
