//! Inventory and content constraints on a loaded dataset.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::seed::DomainDataset;

pub const EXPECTED_MATERIALS: usize = 53;
pub const EXPECTED_FAMILIES: usize = 7;
pub const EXPECTED_PROCESSES: usize = 9;
pub const EXPECTED_FEEDSTOCKS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counts {
    pub materials: usize,
    pub families: usize,
    pub processes: usize,
    pub feedstocks: usize,
    pub post_processing: usize,
    pub fusion_techniques: usize,
    pub states: usize,
    pub printable_by: usize,
    pub state_transitions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Count { what: &'static str, actual: usize, expected: usize },
    ProcessWithoutMaterial { process: String },
    MaterialWithoutProcess { material: String },
    NonPositive { process: String, attribute: &'static str, value: f64 },
    NoFeedstock { process: String },
    SelfTransition { state: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Count { what, actual, expected } => write!(f, "{what} count {actual} ≠ {expected}"),
            Violation::ProcessWithoutMaterial { process } => {
                write!(f, "process {process:?} has no compatible material")
            }
            Violation::MaterialWithoutProcess { material } => {
                write!(f, "material {material:?} has no compatible process")
            }
            Violation::NonPositive { process, attribute, value } => {
                write!(f, "process {process:?} has {attribute} = {value}, must be positive")
            }
            Violation::NoFeedstock { process } => write!(f, "process {process:?} lists no feedstock"),
            Violation::SelfTransition { state } => write!(f, "state {state:?} transitions to itself"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub counts: Counts,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.counts;
        writeln!(f, "materials: {}", c.materials)?;
        writeln!(f, "families: {}", c.families)?;
        writeln!(f, "processes: {}", c.processes)?;
        writeln!(f, "feedstocks: {}", c.feedstocks)?;
        writeln!(f, "post-processing steps: {}", c.post_processing)?;
        writeln!(f, "fusion techniques: {}", c.fusion_techniques)?;
        writeln!(f, "material states: {}", c.states)?;
        writeln!(f, "printable_by records: {}", c.printable_by)?;
        writeln!(f, "state transitions: {}", c.state_transitions)?;
        if self.violations.is_empty() {
            write!(f, "violations: 0")
        } else {
            write!(f, "violations: {}", self.violations.len())?;
            for v in &self.violations {
                write!(f, "\n  - {v}")?;
            }
            Ok(())
        }
    }
}

pub fn validate_dataset(d: &DomainDataset) -> ValidationReport {
    let counts = Counts {
        materials: d.materials.len(),
        families: d.families().len(),
        processes: d.processes.len(),
        feedstocks: d.feedstocks.len(),
        post_processing: d.post_processing.len(),
        fusion_techniques: d.fusion_techniques.len(),
        states: d.states.len(),
        printable_by: d.printable_by.len(),
        state_transitions: d.state_transitions.len(),
    };
    let mut violations = Vec::new();
    for (what, actual, expected) in [
        ("material", counts.materials, EXPECTED_MATERIALS),
        ("family", counts.families, EXPECTED_FAMILIES),
        ("process", counts.processes, EXPECTED_PROCESSES),
        ("feedstock", counts.feedstocks, EXPECTED_FEEDSTOCKS),
    ] {
        if actual != expected {
            violations.push(Violation::Count { what, actual, expected });
        }
    }

    let printable_processes: HashSet<&str> = d.printable_by.iter().map(|r| r.process_name.as_str()).collect();
    let printable_materials: HashSet<&str> = d.printable_by.iter().map(|r| r.material_name.as_str()).collect();
    for p in &d.processes {
        if !printable_processes.contains(p.name.as_str()) {
            violations.push(Violation::ProcessWithoutMaterial { process: p.name.clone() });
        }
        if p.feedstock_names.is_empty() {
            violations.push(Violation::NoFeedstock { process: p.name.clone() });
        }
        for (attribute, value) in [
            ("deposition_rate_cc_hr", p.deposition_rate_cc_hr),
            ("feature_resolution_mm", p.feature_resolution_mm),
            ("build_x_mm", p.build_x_mm),
            ("build_y_mm", p.build_y_mm),
            ("build_z_mm", p.build_z_mm),
        ] {
            // written so NaN also fails
            if !(value > 0.0) {
                violations.push(Violation::NonPositive { process: p.name.clone(), attribute, value });
            }
        }
    }
    for m in &d.materials {
        if !printable_materials.contains(m.name.as_str()) {
            violations.push(Violation::MaterialWithoutProcess { material: m.name.clone() });
        }
    }
    for t in &d.state_transitions {
        if t.from_state == t.to_state {
            violations.push(Violation::SelfTransition { state: t.from_state.clone() });
        }
    }
    ValidationReport { counts, violations }
}
