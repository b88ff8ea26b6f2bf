//! Dataset to graph, and graph back to records.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use super::seed::*;
use crate::graph::{
    EdgeId, FrozenGraph, GraphBuilder, GraphError, NodeId, Properties, PropertyValue,
};

pub mod labels {
    pub const MATERIAL: &str = "Material";
    pub const FAMILY: &str = "MaterialFamily";
    pub const PROCESS: &str = "Process";
    pub const FEEDSTOCK: &str = "Feedstock";
    pub const FUSION: &str = "FusionTechnique";
    pub const POST: &str = "PostProcess";
    pub const STATE: &str = "MaterialState";
}

pub mod rels {
    pub const BELONGS_TO: &str = "BELONGS_TO";
    pub const PRINTABLE_BY: &str = "PRINTABLE_BY";
    pub const USES_FEEDSTOCK: &str = "USES_FEEDSTOCK";
    pub const USES_FUSION: &str = "USES_FUSION";
    pub const REQUIRES_POST: &str = "REQUIRES_POST";
    pub const TRANSITIONS_TO: &str = "TRANSITIONS_TO";
    pub const VIA_STEP: &str = "VIA_STEP";
}

/// The five quantitative process properties, in canonical order.
pub const PROCESS_QUANTITIES: [&str; 5] = [
    "deposition_rate_cc_hr",
    "feature_resolution_mm",
    "build_x_mm",
    "build_y_mm",
    "build_z_mm",
];

fn named(name: &str) -> Properties {
    let mut p = Properties::new();
    p.insert("name".into(), PropertyValue::from(name));
    p
}

/// Builds the knowledge graph. `VIA_STEP` links each reached state to the
/// post-process that produces it, once per (state, step); the step of each
/// individual transition is also kept as the `via_step` edge property.
pub fn build_graph(d: &DomainDataset) -> Result<FrozenGraph, GraphError> {
    use labels::*;
    use rels::*;
    let mut g = GraphBuilder::new();
    let mut ids: HashMap<(&str, &str), NodeId> = HashMap::new();

    for fam in d.families() {
        ids.insert((FAMILY, fam.name()), g.add_node([FAMILY], named(fam.name()))?);
    }
    for m in &d.materials {
        let mut p = named(&m.name);
        p.insert("synonyms".into(), PropertyValue::TextList(m.synonyms.clone()));
        ids.insert((MATERIAL, &m.name), g.add_node([MATERIAL], p)?);
    }
    for f in &d.feedstocks {
        let mut p = named(f.name.name());
        p.insert("size_note".into(), PropertyValue::from(f.size_note.as_str()));
        ids.insert((FEEDSTOCK, f.name.name()), g.add_node([FEEDSTOCK], p)?);
    }
    for f in &d.fusion_techniques {
        ids.insert((FUSION, &f.name), g.add_node([FUSION], named(&f.name))?);
    }
    for s in &d.post_processing {
        ids.insert((POST, &s.name), g.add_node([POST], named(&s.name))?);
    }
    for s in &d.states {
        ids.insert((STATE, &s.name), g.add_node([STATE], named(&s.name))?);
    }
    for p in &d.processes {
        let mut props = named(&p.name);
        props.insert("abbreviation".into(), PropertyValue::from(p.abbreviation.as_str()));
        for (key, value) in PROCESS_QUANTITIES.iter().zip(quantities(p)) {
            props.insert((*key).into(), PropertyValue::Number(value));
        }
        ids.insert((PROCESS, &p.name), g.add_node([PROCESS], props)?);
    }

    let missing = |label: &str, name: &str| GraphError::InvalidProperty {
        key: "name".into(),
        reason: format!("no {label} node named {name:?}"),
    };
    let id = |label: &'static str, name: &str| ids.get(&(label, name)).copied().ok_or_else(|| missing(label, name));

    for m in &d.materials {
        g.add_edge(id(MATERIAL, &m.name)?, id(FAMILY, m.family.name())?, BELONGS_TO, Properties::new())?;
    }
    for r in &d.printable_by {
        g.add_edge(id(MATERIAL, &r.material_name)?, id(PROCESS, &r.process_name)?, PRINTABLE_BY, Properties::new())?;
    }
    for p in &d.processes {
        let pid = id(PROCESS, &p.name)?;
        for f in &p.feedstock_names {
            g.add_edge(pid, id(FEEDSTOCK, f)?, USES_FEEDSTOCK, Properties::new())?;
        }
        g.add_edge(pid, id(FUSION, &p.fusion_technique)?, USES_FUSION, Properties::new())?;
        for s in &p.post_processing_names {
            g.add_edge(pid, id(POST, s)?, REQUIRES_POST, Properties::new())?;
        }
    }
    let mut via_seen = HashSet::new();
    for t in &d.state_transitions {
        let mut props = Properties::new();
        props.insert("via_step".into(), PropertyValue::from(t.via_step.as_str()));
        g.add_edge(id(STATE, &t.from_state)?, id(STATE, &t.to_state)?, TRANSITIONS_TO, props)?;
        if via_seen.insert((&t.to_state, &t.via_step)) {
            g.add_edge(id(STATE, &t.to_state)?, id(POST, &t.via_step)?, VIA_STEP, Properties::new())?;
        }
    }
    g.freeze()
}

pub(crate) fn quantities(p: &ProcessSpec) -> [f64; 5] {
    [
        p.deposition_rate_cc_hr,
        p.feature_resolution_mm,
        p.build_x_mm,
        p.build_y_mm,
        p.build_z_mm,
    ]
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExportError {
    #[error("node {0} has an unexpected label set")]
    UnexpectedNode(NodeId),
    #[error("edge {0} does not fit the domain schema")]
    UnexpectedEdge(EdgeId),
    #[error("{0} is missing property {1:?}")]
    MissingProperty(String, &'static str),
    #[error("VIA_STEP edges disagree with the transitions' via_step properties")]
    ViaStepMismatch,
}

/// Reads the graph back into record form. Every node and every edge must be
/// accounted for by exactly one record, otherwise an error names the stray.
pub fn export_dataset(g: &FrozenGraph) -> Result<DomainDataset, ExportError> {
    use labels::*;
    use rels::*;

    let text = |id: NodeId, key: &'static str| -> Result<String, ExportError> {
        g.node(id)
            .and_then(|n| n.properties.get(key))
            .and_then(PropertyValue::as_text)
            .map(str::to_string)
            .ok_or_else(|| ExportError::MissingProperty(format!("node {id}"), key))
    };
    let name = |id: NodeId| text(id, "name");
    let number = |id: NodeId, key: &'static str| -> Result<f64, ExportError> {
        g.node(id)
            .and_then(|n| n.properties.get(key))
            .and_then(PropertyValue::as_f64)
            .ok_or_else(|| ExportError::MissingProperty(format!("node {id}"), key))
    };

    let label_of = |id: NodeId| -> Result<&str, ExportError> {
        match g.node(id).map(|n| n.labels.as_slice()) {
            Some([l]) if [MATERIAL, FAMILY, PROCESS, FEEDSTOCK, FUSION, POST, STATE].contains(&l.as_str()) => {
                Ok(l.as_str())
            }
            _ => Err(ExportError::UnexpectedNode(id)),
        }
    };
    let mut by_label: BTreeMap<&str, Vec<NodeId>> = BTreeMap::new();
    for n in g.nodes() {
        by_label.entry(label_of(n.id)?).or_default().push(n.id);
    }
    let members = |l: &str| by_label.get(l).cloned().unwrap_or_default();

    // Group edges by (type, from); anything not consumed below is a stray.
    let mut unused: HashSet<EdgeId> = g.edges().iter().map(|e| e.id).collect();
    let mut edge_targets = |from: NodeId, rel: &str, to_label: &str| -> Result<Vec<NodeId>, ExportError> {
        let mut out = Vec::new();
        for e in g.edges().iter().filter(|e| e.from == from && e.rel_type == rel) {
            if label_of(e.to)? != to_label || !e.properties.is_empty() {
                return Err(ExportError::UnexpectedEdge(e.id));
            }
            unused.remove(&e.id);
            out.push(e.to);
        }
        Ok(out)
    };

    let mut materials = Vec::new();
    let mut printable_by = Vec::new();
    for id in members(MATERIAL) {
        let fams = edge_targets(id, BELONGS_TO, FAMILY)?;
        let [fam] = fams.as_slice() else {
            return Err(ExportError::MissingProperty(name(id)?, "family"));
        };
        let family = Family::from_name(&name(*fam)?).ok_or(ExportError::UnexpectedNode(*fam))?;
        let synonyms = match g.node(id).and_then(|n| n.properties.get("synonyms")) {
            Some(PropertyValue::TextList(v)) => v.clone(),
            _ => return Err(ExportError::MissingProperty(name(id)?, "synonyms")),
        };
        materials.push(MaterialSpec { name: name(id)?, family, synonyms });
    }

    let mut processes = Vec::new();
    for id in members(PROCESS) {
        let names_of = |ids: Vec<NodeId>| ids.into_iter().map(name).collect::<Result<Vec<_>, _>>();
        let feedstock_names = names_of(edge_targets(id, USES_FEEDSTOCK, FEEDSTOCK)?)?;
        let fusions = edge_targets(id, USES_FUSION, FUSION)?;
        let [fusion] = fusions.as_slice() else {
            return Err(ExportError::MissingProperty(name(id)?, "fusion_technique"));
        };
        let post_processing_names = names_of(edge_targets(id, REQUIRES_POST, POST)?)?;
        processes.push(ProcessSpec {
            name: name(id)?,
            abbreviation: text(id, "abbreviation")?,
            feedstock_names,
            fusion_technique: name(*fusion)?,
            deposition_rate_cc_hr: number(id, "deposition_rate_cc_hr")?,
            feature_resolution_mm: number(id, "feature_resolution_mm")?,
            build_x_mm: number(id, "build_x_mm")?,
            build_y_mm: number(id, "build_y_mm")?,
            build_z_mm: number(id, "build_z_mm")?,
            post_processing_names,
        });
    }

    for e in g.edges().iter().filter(|e| e.rel_type == PRINTABLE_BY) {
        if label_of(e.from)? != MATERIAL || label_of(e.to)? != PROCESS || !e.properties.is_empty() {
            return Err(ExportError::UnexpectedEdge(e.id));
        }
        unused.remove(&e.id);
        printable_by.push(CompatibilityRecord { material_name: name(e.from)?, process_name: name(e.to)? });
    }

    let mut state_transitions = Vec::new();
    let mut expected_via = HashSet::new();
    for e in g.edges().iter().filter(|e| e.rel_type == TRANSITIONS_TO) {
        let via = e.properties.get("via_step").and_then(PropertyValue::as_text);
        match via {
            Some(via) if label_of(e.from)? == STATE && label_of(e.to)? == STATE && e.properties.len() == 1 => {
                unused.remove(&e.id);
                expected_via.insert((e.to, via.to_string()));
                state_transitions.push(StateTransition {
                    from_state: name(e.from)?,
                    to_state: name(e.to)?,
                    via_step: via.to_string(),
                });
            }
            _ => return Err(ExportError::UnexpectedEdge(e.id)),
        }
    }
    let mut actual_via = HashSet::new();
    for e in g.edges().iter().filter(|e| e.rel_type == VIA_STEP) {
        if label_of(e.from)? != STATE || label_of(e.to)? != POST || !e.properties.is_empty() {
            return Err(ExportError::UnexpectedEdge(e.id));
        }
        unused.remove(&e.id);
        if !actual_via.insert((e.from, name(e.to)?)) {
            return Err(ExportError::ViaStepMismatch);
        }
    }
    if actual_via != expected_via {
        return Err(ExportError::ViaStepMismatch);
    }
    if let Some(stray) = unused.into_iter().min() {
        return Err(ExportError::UnexpectedEdge(stray));
    }

    let feedstocks = members(FEEDSTOCK)
        .into_iter()
        .map(|id| {
            let n = name(id)?;
            let kind = [FeedstockKind::Powder, FeedstockKind::Wire, FeedstockKind::Foil, FeedstockKind::Bar]
                .into_iter()
                .find(|k| k.name() == n)
                .ok_or(ExportError::UnexpectedNode(id))?;
            Ok(FeedstockSpec { name: kind, size_note: text(id, "size_note")? })
        })
        .collect::<Result<Vec<_>, ExportError>>()?;

    // A family node with no member material would be an invention.
    for id in members(FAMILY) {
        if !g.edges().iter().any(|e| e.to == id && e.rel_type == BELONGS_TO) {
            return Err(ExportError::UnexpectedNode(id));
        }
    }

    let simple = |l: &str| members(l).into_iter().map(name).collect::<Result<Vec<_>, _>>();
    Ok(DomainDataset {
        materials,
        processes,
        feedstocks,
        post_processing: simple(POST)?.into_iter().map(|name| PostProcessSpec { name }).collect(),
        fusion_techniques: simple(FUSION)?.into_iter().map(|name| FusionTechniqueSpec { name }).collect(),
        states: simple(STATE)?.into_iter().map(|name| StateSpec { name }).collect(),
        printable_by,
        state_transitions,
    })
}
