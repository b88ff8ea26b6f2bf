//! In-memory directed labeled property graph.
//!
//! A [`GraphBuilder`] collects nodes and edges during ingestion; [`GraphBuilder::freeze`]
//! consumes it and produces an immutable [`FrozenGraph`] with label and
//! relationship indexes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Property name that every node must carry and that is unique per label.
pub const NAME_KEY: &str = "name";

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum PropertyValue {
    Text(String),
    Number(f64),
    Integer(i64),
    Boolean(bool),
    TextList(Vec<String>),
}

impl PropertyValue {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            PropertyValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            PropertyValue::Number(v) => Some(*v),
            PropertyValue::Integer(v) => Some(*v as f64),
            _ => None,
        }
    }

    fn check(&self) -> Result<(), &'static str> {
        match self {
            PropertyValue::Number(v) if !v.is_finite() => Err("number is not finite"),
            PropertyValue::TextList(items) if items.iter().any(String::is_empty) => {
                Err("list contains an empty string")
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for PropertyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyValue::Text(s) => f.write_str(s),
            PropertyValue::Number(v) => write!(f, "{v}"),
            PropertyValue::Integer(v) => write!(f, "{v}"),
            PropertyValue::Boolean(v) => write!(f, "{v}"),
            PropertyValue::TextList(items) => f.write_str(&items.join(", ")),
        }
    }
}

impl From<&str> for PropertyValue {
    fn from(s: &str) -> Self {
        PropertyValue::Text(s.to_string())
    }
}

impl From<String> for PropertyValue {
    fn from(s: String) -> Self {
        PropertyValue::Text(s)
    }
}

impl From<f64> for PropertyValue {
    fn from(v: f64) -> Self {
        PropertyValue::Number(v)
    }
}

impl From<i64> for PropertyValue {
    fn from(v: i64) -> Self {
        PropertyValue::Integer(v)
    }
}

impl From<bool> for PropertyValue {
    fn from(v: bool) -> Self {
        PropertyValue::Boolean(v)
    }
}

impl From<Vec<String>> for PropertyValue {
    fn from(v: Vec<String>) -> Self {
        PropertyValue::TextList(v)
    }
}

pub type Properties = BTreeMap<String, PropertyValue>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub labels: Vec<String>,
    pub properties: Properties,
}

impl Node {
    pub fn has_label(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn name(&self) -> Option<&str> {
        self.properties.get(NAME_KEY).and_then(PropertyValue::as_text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: EdgeId,
    pub from: NodeId,
    pub to: NodeId,
    pub rel_type: String,
    pub properties: Properties,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Outgoing,
    Incoming,
    Both,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("node must carry at least one non-empty label")]
    EmptyLabels,
    #[error("invalid property {key:?}: {reason}")]
    InvalidProperty { key: String, reason: String },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("relationship type must be non-empty uppercase with underscores, got {0:?}")]
    EmptyRelType(String),
    #[error("two {label} nodes are named {name:?}")]
    DuplicateName { label: String, name: String },
    #[error("node {0} has no text \"name\" property")]
    MissingName(NodeId),
}

fn check_properties(props: &Properties) -> Result<(), GraphError> {
    for (key, value) in props {
        if key.is_empty() {
            return Err(GraphError::InvalidProperty {
                key: key.clone(),
                reason: "empty key".into(),
            });
        }
        value.check().map_err(|reason| GraphError::InvalidProperty {
            key: key.clone(),
            reason: reason.into(),
        })?;
    }
    Ok(())
}

fn valid_rel_type(rel_type: &str) -> bool {
    !rel_type.is_empty()
        && rel_type
            .chars()
            .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
        && !rel_type.starts_with(|c: char| c.is_ascii_digit())
}

/// Mutable, single-owner graph under construction.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.0 as usize)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn add_node<I, S>(&mut self, labels: I, properties: Properties) -> Result<NodeId, GraphError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut ordered: Vec<String> = Vec::new();
        for label in labels {
            let label = label.into();
            if label.is_empty() {
                return Err(GraphError::EmptyLabels);
            }
            if !ordered.contains(&label) {
                ordered.push(label);
            }
        }
        if ordered.is_empty() {
            return Err(GraphError::EmptyLabels);
        }
        check_properties(&properties)?;
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node {
            id,
            labels: ordered,
            properties,
        });
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        from: NodeId,
        to: NodeId,
        rel_type: &str,
        properties: Properties,
    ) -> Result<EdgeId, GraphError> {
        for endpoint in [from, to] {
            if self.node(endpoint).is_none() {
                return Err(GraphError::UnknownNode(endpoint));
            }
        }
        if !valid_rel_type(rel_type) {
            return Err(GraphError::EmptyRelType(rel_type.to_string()));
        }
        check_properties(&properties)?;
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(Edge {
            id,
            from,
            to,
            rel_type: rel_type.to_string(),
            properties,
        });
        Ok(id)
    }

    /// Checks name uniqueness per label and builds the indexes.
    pub fn freeze(self) -> Result<FrozenGraph, GraphError> {
        let mut seen: HashMap<(&str, &str), ()> = HashMap::new();
        for node in &self.nodes {
            let name = node.name().ok_or(GraphError::MissingName(node.id))?;
            for label in &node.labels {
                if seen.insert((label.as_str(), name), ()).is_some() {
                    return Err(GraphError::DuplicateName {
                        label: label.clone(),
                        name: name.to_string(),
                    });
                }
            }
        }

        let mut by_label: HashMap<String, BTreeSet<NodeId>> = HashMap::new();
        for node in &self.nodes {
            for label in &node.labels {
                by_label.entry(label.clone()).or_default().insert(node.id);
            }
        }

        let mut outgoing: Vec<HashMap<String, Vec<EdgeId>>> = vec![HashMap::new(); self.nodes.len()];
        let mut incoming: Vec<HashMap<String, Vec<EdgeId>>> = vec![HashMap::new(); self.nodes.len()];
        let mut out_all = vec![Vec::new(); self.nodes.len()];
        let mut in_all = vec![Vec::new(); self.nodes.len()];
        for edge in &self.edges {
            outgoing[edge.from.0 as usize]
                .entry(edge.rel_type.clone())
                .or_default()
                .push(edge.id);
            incoming[edge.to.0 as usize]
                .entry(edge.rel_type.clone())
                .or_default()
                .push(edge.id);
            out_all[edge.from.0 as usize].push(edge.id);
            in_all[edge.to.0 as usize].push(edge.id);
        }

        Ok(FrozenGraph {
            nodes: self.nodes,
            edges: self.edges,
            by_label,
            outgoing,
            incoming,
            out_all,
            in_all,
        })
    }
}

/// Immutable indexed snapshot. Safe to share across threads without locking.
#[derive(Debug, Clone)]
pub struct FrozenGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    by_label: HashMap<String, BTreeSet<NodeId>>,
    /// per node: relationship type -> edges
    outgoing: Vec<HashMap<String, Vec<EdgeId>>>,
    incoming: Vec<HashMap<String, Vec<EdgeId>>>,
    out_all: Vec<Vec<EdgeId>>,
    in_all: Vec<Vec<EdgeId>>,
}

impl FrozenGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.0 as usize)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(id.0 as usize)
    }

    pub fn nodes_with_label(&self, label: &str) -> BTreeSet<NodeId> {
        self.by_label.get(label).cloned().unwrap_or_default()
    }

    pub fn label_count(&self, label: &str) -> usize {
        self.by_label.get(label).map_or(0, BTreeSet::len)
    }

    /// Iterates the label index without cloning.
    pub fn label_members(&self, label: &str) -> impl Iterator<Item = NodeId> + '_ {
        self.by_label.get(label).into_iter().flatten().copied()
    }

    pub fn find_by_name(&self, label: &str, name: &str) -> Option<&Node> {
        self.label_members(label)
            .filter_map(|id| self.node(id))
            .find(|n| n.name() == Some(name))
    }

    /// Edges incident to `node`, optionally restricted to one relationship type.
    ///
    /// With [`Direction::Both`] a self-loop is listed once.
    pub fn edges_from(
        &self,
        node: NodeId,
        rel_type: Option<&str>,
        direction: Direction,
    ) -> Result<Vec<&Edge>, GraphError> {
        if self.node(node).is_none() {
            return Err(GraphError::UnknownNode(node));
        }
        Ok(self.incident_ids(node, rel_type, direction).map(|id| &self.edges[id.0 as usize]).collect())
    }

    pub(crate) fn incident_ids(
        &self,
        node: NodeId,
        rel_type: Option<&str>,
        direction: Direction,
    ) -> impl Iterator<Item = EdgeId> + '_ {
        let empty: &[EdgeId] = &[];
        let idx = node.0 as usize;
        let (out, inc): (&[EdgeId], &[EdgeId]) = match rel_type {
            Some(t) => (
                typed(&self.outgoing, idx, t).unwrap_or(empty),
                typed(&self.incoming, idx, t).unwrap_or(empty),
            ),
            None => (
                self.out_all.get(idx).map_or(empty, Vec::as_slice),
                self.in_all.get(idx).map_or(empty, Vec::as_slice),
            ),
        };
        let (out, inc) = match direction {
            Direction::Outgoing => (out, empty),
            Direction::Incoming => (empty, inc),
            Direction::Both => (out, inc),
        };
        let edges = &self.edges;
        out.iter().copied().chain(
            inc.iter()
                .copied()
                // a self-loop already appeared in the outgoing half
                .filter(move |id| !(direction == Direction::Both && edges[id.0 as usize].from == node)),
        )
    }

    /// Rebuilds the indexes from the raw stores and compares them with the live ones.
    pub fn indexes_consistent(&self) -> bool {
        let mut label_ok = true;
        let mut rescanned: HashMap<&str, BTreeSet<NodeId>> = HashMap::new();
        for node in &self.nodes {
            for label in &node.labels {
                rescanned.entry(label).or_default().insert(node.id);
            }
        }
        label_ok &= rescanned.len() == self.by_label.len();
        for (label, ids) in &rescanned {
            label_ok &= self.by_label.get(*label) == Some(ids);
        }

        let edges_ok = self.nodes.iter().all(|n| {
            let types: BTreeSet<&str> = self.edges.iter().map(|e| e.rel_type.as_str()).collect();
            let mut filters: Vec<Option<&str>> = types.into_iter().map(Some).collect();
            filters.push(None);
            filters.into_iter().all(|t| {
                [Direction::Outgoing, Direction::Incoming, Direction::Both]
                    .into_iter()
                    .all(|dir| {
                        let mut indexed: Vec<EdgeId> = self.incident_ids(n.id, t, dir).collect();
                        let mut scanned: Vec<EdgeId> = self
                            .edges
                            .iter()
                            .filter(|e| t.is_none_or(|t| e.rel_type == t))
                            .filter(|e| match dir {
                                Direction::Outgoing => e.from == n.id,
                                Direction::Incoming => e.to == n.id,
                                Direction::Both => e.from == n.id || e.to == n.id,
                            })
                            .map(|e| e.id)
                            .collect();
                        indexed.sort();
                        scanned.sort();
                        indexed == scanned
                    })
            })
        });
        let integrity = self
            .edges
            .iter()
            .all(|e| self.node(e.from).is_some() && self.node(e.to).is_some());
        label_ok && edges_ok && integrity
    }
}

fn typed<'a>(index: &'a [HashMap<String, Vec<EdgeId>>], node: usize, rel_type: &str) -> Option<&'a [EdgeId]> {
    index.get(node)?.get(rel_type).map(Vec::as_slice)
}
