//! Seed document format and loading.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The shipped seed document.
pub const SHIPPED_SEED: &str = include_str!("../../data/amkg_seed.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    Nickel,
    Iron,
    Copper,
    Cobalt,
    Titanium,
    Aluminum,
    Refractory,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Nickel,
        Family::Iron,
        Family::Copper,
        Family::Cobalt,
        Family::Titanium,
        Family::Aluminum,
        Family::Refractory,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Nickel => "Nickel",
            Family::Iron => "Iron",
            Family::Copper => "Copper",
            Family::Cobalt => "Cobalt",
            Family::Titanium => "Titanium",
            Family::Aluminum => "Aluminum",
            Family::Refractory => "Refractory",
        }
    }

    pub fn from_name(name: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == name)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FeedstockKind {
    Powder,
    Wire,
    Foil,
    Bar,
}

impl FeedstockKind {
    pub fn name(self) -> &'static str {
        match self {
            FeedstockKind::Powder => "Powder",
            FeedstockKind::Wire => "Wire",
            FeedstockKind::Foil => "Foil",
            FeedstockKind::Bar => "Bar",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    pub name: String,
    pub family: Family,
    #[serde(default)]
    pub synonyms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSpec {
    pub name: String,
    pub abbreviation: String,
    pub feedstock_names: Vec<String>,
    pub fusion_technique: String,
    #[serde(deserialize_with = "rate")]
    pub deposition_rate_cc_hr: f64,
    #[serde(deserialize_with = "length")]
    pub feature_resolution_mm: f64,
    #[serde(deserialize_with = "length")]
    pub build_x_mm: f64,
    #[serde(deserialize_with = "length")]
    pub build_y_mm: f64,
    #[serde(deserialize_with = "length")]
    pub build_z_mm: f64,
    pub post_processing_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedstockSpec {
    pub name: FeedstockKind,
    pub size_note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PostProcessSpec {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FusionTechniqueSpec {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompatibilityRecord {
    pub material_name: String,
    pub process_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateTransition {
    pub from_state: String,
    pub to_state: String,
    pub via_step: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainDataset {
    pub materials: Vec<MaterialSpec>,
    pub processes: Vec<ProcessSpec>,
    pub feedstocks: Vec<FeedstockSpec>,
    pub post_processing: Vec<PostProcessSpec>,
    pub fusion_techniques: Vec<FusionTechniqueSpec>,
    pub states: Vec<StateSpec>,
    pub printable_by: Vec<CompatibilityRecord>,
    pub state_transitions: Vec<StateTransition>,
}

impl DomainDataset {
    /// Distinct families used by the materials, in declaration order of [`Family::ALL`].
    pub fn families(&self) -> Vec<Family> {
        let used: BTreeSet<Family> = self.materials.iter().map(|m| m.family).collect();
        used.into_iter().collect()
    }

    pub fn material(&self, name: &str) -> Option<&MaterialSpec> {
        self.materials.iter().find(|m| m.name == name)
    }

    pub fn process(&self, name: &str) -> Option<&ProcessSpec> {
        self.processes.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntegrityIssue {
    DanglingReference { context: String, kind: &'static str, name: String },
    DuplicateRecord { kind: &'static str, name: String },
}

impl fmt::Display for IntegrityIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegrityIssue::DanglingReference { context, kind, name } => {
                write!(f, "{context} references undeclared {kind} {name:?}")
            }
            IntegrityIssue::DuplicateRecord { kind, name } => write!(f, "duplicate {kind} {name:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoadError {
    #[error("seed format error at {path} (line {line}, column {column}): {message}")]
    Format { path: String, line: usize, column: usize, message: String },
    #[error("seed integrity errors: {}", join(.0))]
    Integrity(Vec<IntegrityIssue>),
    #[error("cannot read seed file {path}: {message}")]
    Io { path: String, message: String },
}

impl LoadError {
    pub fn issues(&self) -> &[IntegrityIssue] {
        match self {
            LoadError::Integrity(v) => v,
            _ => &[],
        }
    }
}

fn join(issues: &[IntegrityIssue]) -> String {
    issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Parses a seed document strictly and checks referential integrity.
pub fn load_seed(document_text: &str) -> Result<DomainDataset, LoadError> {
    let mut de = serde_json::Deserializer::from_str(document_text);
    let dataset: DomainDataset = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        LoadError::Format {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| LoadError::Format {
        path: ".".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let issues = integrity_issues(&dataset);
    if issues.is_empty() {
        Ok(dataset)
    } else {
        Err(LoadError::Integrity(issues))
    }
}

/// Reads and loads a seed file from disk.
pub fn load_seed_file(path: &std::path::Path) -> Result<DomainDataset, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    load_seed(&text)
}

pub fn shipped_dataset() -> DomainDataset {
    load_seed(SHIPPED_SEED).expect("shipped seed loads")
}

fn integrity_issues(d: &DomainDataset) -> Vec<IntegrityIssue> {
    let mut issues = Vec::new();

    let mut declared = |kind: &'static str, names: Vec<&str>| -> HashSet<String> {
        let mut set = HashSet::new();
        for n in names {
            if !set.insert(n.to_string()) {
                issues.push(IntegrityIssue::DuplicateRecord { kind, name: n.to_string() });
            }
        }
        set
    };
    let materials = declared("material", d.materials.iter().map(|m| m.name.as_str()).collect());
    let processes = declared("process", d.processes.iter().map(|p| p.name.as_str()).collect());
    let feedstocks = declared("feedstock", d.feedstocks.iter().map(|f| f.name.name()).collect());
    let posts = declared("post-process", d.post_processing.iter().map(|p| p.name.as_str()).collect());
    let fusions = declared("fusion technique", d.fusion_techniques.iter().map(|f| f.name.as_str()).collect());
    let states = declared("state", d.states.iter().map(|s| s.name.as_str()).collect());

    let mut dangling = |context: String, kind: &'static str, name: &str, set: &HashSet<String>| {
        if !set.contains(name) {
            issues.push(IntegrityIssue::DanglingReference { context, kind, name: name.to_string() });
        }
    };
    for p in &d.processes {
        let ctx = format!("process {:?}", p.name);
        for f in &p.feedstock_names {
            dangling(ctx.clone(), "feedstock", f, &feedstocks);
        }
        dangling(ctx.clone(), "fusion technique", &p.fusion_technique, &fusions);
        for s in &p.post_processing_names {
            dangling(ctx.clone(), "post-process", s, &posts);
        }
    }
    for r in &d.printable_by {
        let ctx = format!("printable_by ({:?}, {:?})", r.material_name, r.process_name);
        dangling(ctx.clone(), "material", &r.material_name, &materials);
        dangling(ctx, "process", &r.process_name, &processes);
    }
    for t in &d.state_transitions {
        let ctx = format!("state transition {:?} -> {:?}", t.from_state, t.to_state);
        dangling(ctx.clone(), "state", &t.from_state, &states);
        dangling(ctx.clone(), "state", &t.to_state, &states);
        dangling(ctx, "post-process", &t.via_step, &posts);
    }

    let mut pairs = HashSet::new();
    for r in &d.printable_by {
        if !pairs.insert(r) {
            issues.push(IntegrityIssue::DuplicateRecord {
                kind: "printable_by record",
                name: format!("{} / {}", r.material_name, r.process_name),
            });
        }
    }
    let mut seen = HashSet::new();
    for t in &d.state_transitions {
        if !seen.insert(t) {
            issues.push(IntegrityIssue::DuplicateRecord {
                kind: "state transition",
                name: format!("{} -> {} via {}", t.from_state, t.to_state, t.via_step),
            });
        }
    }
    issues
}

/// Accepts a bare number, or a string whose unit suffix is exactly `unit`.
/// Other suffixes are rejected rather than converted.
fn quantity<'de, D: Deserializer<'de>>(d: D, unit: &'static str) -> Result<f64, D::Error> {
    struct Q(&'static str);
    impl Visitor<'_> for Q {
        type Value = f64;
        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            write!(f, "a number or a string like \"12.5 {}\"", self.0)
        }
        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }
        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            let v = v.trim();
            let split = v
                .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')))
                .unwrap_or(v.len());
            let (num, suffix) = v.split_at(split);
            let suffix = suffix.trim();
            if suffix != self.0 {
                return Err(E::custom(format!("unit {suffix:?} not accepted, expected {:?}", self.0)));
            }
            num.parse::<f64>().map_err(|_| E::custom(format!("invalid number {num:?}")))
        }
    }
    d.deserialize_any(Q(unit))
}

fn length<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    quantity(d, "mm")
}

fn rate<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    quantity(d, "cc/hr")
}
