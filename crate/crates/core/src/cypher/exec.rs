//! Pattern-matching executor.
//!
//! Bindings are found by backtracking, seeded from the node pattern with the
//! fewest label-index candidates and expanding along relationship patterns
//! through the adjacency index. Within one MATCH clause a graph edge binds to
//! at most one relationship pattern. Missing properties make comparisons
//! false; there is no three-valued logic.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::ast::*;
use super::error::CypherError;
use crate::graph::{Direction, EdgeId, FrozenGraph, Node, NodeId, PropertyValue};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeRef {
    pub id: NodeId,
    pub labels: Vec<String>,
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelRef {
    pub id: EdgeId,
    #[serde(rename = "type")]
    pub rel_type: String,
    pub from: NodeId,
    pub to: NodeId,
}

/// One cell of a [`ResultTable`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Null,
    Text(String),
    Number(f64),
    Integer(i64),
    Boolean(bool),
    List(Vec<Value>),
    Node(NodeRef),
    Relationship(RelRef),
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(v) => Some(*v),
            Value::Integer(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Type-tagged encoding used for grouping and DISTINCT.
    pub fn key(&self) -> String {
        match self {
            Value::Null => "z".into(),
            Value::Text(s) => format!("s{}:{s}", s.len()),
            Value::Number(v) => format!("f{:?}", v),
            Value::Integer(v) => format!("i{v}"),
            Value::Boolean(v) => format!("b{v}"),
            Value::List(items) => {
                let inner: Vec<String> = items.iter().map(Value::key).collect();
                format!("l{}[{}]", items.len(), inner.join(","))
            }
            Value::Node(n) => format!("n{}", n.id.0),
            Value::Relationship(r) => format!("r{}", r.id.0),
        }
    }
}

impl From<&PropertyValue> for Value {
    fn from(p: &PropertyValue) -> Self {
        match p {
            PropertyValue::Text(s) => Value::Text(s.clone()),
            PropertyValue::Number(v) => Value::Number(*v),
            PropertyValue::Integer(v) => Value::Integer(*v),
            PropertyValue::Boolean(v) => Value::Boolean(*v),
            PropertyValue::TextList(items) => {
                Value::List(items.iter().cloned().map(Value::Text).collect())
            }
        }
    }
}

impl From<&Literal> for Value {
    fn from(l: &Literal) -> Self {
        match l {
            Literal::Text(s) => Value::Text(s.clone()),
            Literal::Integer(v) => Value::Integer(*v),
            Literal::Float(v) => Value::Number(*v),
            Literal::Boolean(v) => Value::Boolean(*v),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("null"),
            Value::Text(s) => f.write_str(s),
            Value::Number(v) => write!(f, "{v}"),
            Value::Integer(v) => write!(f, "{v}"),
            Value::Boolean(v) => write!(f, "{v}"),
            Value::List(items) => {
                let parts: Vec<String> = items.iter().map(ToString::to_string).collect();
                f.write_str(&parts.join(", "))
            }
            Value::Node(n) => match &n.name {
                Some(name) => f.write_str(name),
                None => write!(f, "{}", n.id),
            },
            Value::Relationship(r) => write!(f, "{}", r.rel_type),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl ResultTable {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Equality and ordering comparison. Nulls and mismatched types are false.
pub fn compare_values(left: &Value, op: CompareOp, right: &Value) -> bool {
    let ord = match (left, right) {
        (Value::Null, _) | (_, Value::Null) => return false,
        (Value::Integer(a), Value::Integer(b)) => a.cmp(b),
        (a, b) if a.as_f64().is_some() && b.as_f64().is_some() => {
            match a.as_f64().unwrap().partial_cmp(&b.as_f64().unwrap()) {
                Some(o) => o,
                None => return false,
            }
        }
        (Value::Text(a), Value::Text(b)) => a.cmp(b),
        (Value::Boolean(a), Value::Boolean(b)) => return equality_only(op, a == b),
        (Value::Node(a), Value::Node(b)) => return equality_only(op, a.id == b.id),
        (Value::Relationship(a), Value::Relationship(b)) => return equality_only(op, a.id == b.id),
        (Value::List(a), Value::List(b)) => {
            let eq = a.len() == b.len()
                && a.iter().zip(b).all(|(x, y)| compare_values(x, CompareOp::Eq, y));
            return equality_only(op, eq);
        }
        _ => return false,
    };
    match op {
        CompareOp::Eq => ord == Ordering::Equal,
        CompareOp::Ne => ord != Ordering::Equal,
        CompareOp::Lt => ord == Ordering::Less,
        CompareOp::Le => ord != Ordering::Greater,
        CompareOp::Gt => ord == Ordering::Greater,
        CompareOp::Ge => ord != Ordering::Less,
    }
}

fn equality_only(op: CompareOp, eq: bool) -> bool {
    match op {
        CompareOp::Eq => eq,
        CompareOp::Ne => !eq,
        _ => false,
    }
}

fn type_rank(v: &Value) -> u8 {
    match v {
        Value::Boolean(_) => 0,
        Value::Integer(_) | Value::Number(_) => 1,
        Value::Text(_) => 2,
        Value::List(_) => 3,
        Value::Node(_) => 4,
        Value::Relationship(_) => 5,
        Value::Null => 6,
    }
}

/// Total order used by ORDER BY, ascending, with nulls greatest.
pub fn order_values(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Integer(x), Value::Integer(y)) => x.cmp(y),
        (x, y) if x.as_f64().is_some() && y.as_f64().is_some() => {
            x.as_f64().unwrap().total_cmp(&y.as_f64().unwrap())
        }
        (Value::Text(x), Value::Text(y)) => x.cmp(y),
        (Value::Boolean(x), Value::Boolean(y)) => x.cmp(y),
        (Value::List(x), Value::List(y)) => {
            for (p, q) in x.iter().zip(y) {
                let o = order_values(p, q);
                if o != Ordering::Equal {
                    return o;
                }
            }
            x.len().cmp(&y.len())
        }
        (Value::Node(x), Value::Node(y)) => x.id.cmp(&y.id),
        (Value::Relationship(x), Value::Relationship(y)) => x.id.cmp(&y.id),
        _ => type_rank(a).cmp(&type_rank(b)),
    }
}

#[derive(Debug, Default)]
struct NodeSlot {
    labels: Vec<String>,
    props: Vec<(String, Value)>,
}

#[derive(Debug)]
struct RelSlot {
    left: usize,
    right: usize,
    rel_type: Option<String>,
    direction: RelDirection,
    clause: usize,
}

#[derive(Debug, Clone, Copy)]
enum Step {
    Scan(usize),
    /// Expand relationship slot from the bound endpoint; `from_left` tells which.
    Expand { rel: usize, from_left: bool },
}

struct Plan {
    nodes: Vec<NodeSlot>,
    rels: Vec<RelSlot>,
    node_vars: HashMap<String, usize>,
    rel_vars: HashMap<String, usize>,
    steps: Vec<Step>,
}

fn compile(query: &Query, graph: &FrozenGraph) -> Plan {
    let mut nodes: Vec<NodeSlot> = Vec::new();
    let mut rels: Vec<RelSlot> = Vec::new();
    let mut node_vars: HashMap<String, usize> = HashMap::new();
    let mut rel_vars: HashMap<String, usize> = HashMap::new();

    let mut slot_for = |np: &NodePattern, nodes: &mut Vec<NodeSlot>| -> usize {
        let idx = match &np.var {
            Some(v) => *node_vars.entry(v.clone()).or_insert_with(|| {
                nodes.push(NodeSlot::default());
                nodes.len() - 1
            }),
            None => {
                nodes.push(NodeSlot::default());
                nodes.len() - 1
            }
        };
        let slot = &mut nodes[idx];
        if let Some(l) = &np.label {
            if !slot.labels.contains(l) {
                slot.labels.push(l.clone());
            }
        }
        for (k, lit) in &np.properties {
            slot.props.push((k.clone(), Value::from(lit)));
        }
        idx
    };

    for (clause, m) in query.matches.iter().enumerate() {
        for pattern in &m.patterns {
            let mut prev = slot_for(&pattern.start, &mut nodes);
            for step in &pattern.steps {
                let next = slot_for(&step.node, &mut nodes);
                if let Some(v) = &step.rel.var {
                    rel_vars.insert(v.clone(), rels.len());
                }
                rels.push(RelSlot {
                    left: prev,
                    right: next,
                    rel_type: step.rel.rel_type.clone(),
                    direction: step.rel.direction,
                    clause,
                });
                prev = next;
            }
        }
    }

    let estimate = |slot: &NodeSlot| -> usize {
        slot.labels
            .iter()
            .map(|l| graph.label_count(l))
            .min()
            .unwrap_or(graph.node_count())
    };

    let mut bound = vec![false; nodes.len()];
    let mut planned = vec![false; rels.len()];
    let mut steps = Vec::new();
    loop {
        let expand = rels.iter().enumerate().find_map(|(i, r)| {
            if planned[i] {
                None
            } else if bound[r.left] {
                Some((i, true))
            } else if bound[r.right] {
                Some((i, false))
            } else {
                None
            }
        });
        if let Some((rel, from_left)) = expand {
            planned[rel] = true;
            bound[rels[rel].left] = true;
            bound[rels[rel].right] = true;
            steps.push(Step::Expand { rel, from_left });
            continue;
        }
        let seed = (0..nodes.len())
            .filter(|&i| !bound[i])
            .min_by_key(|&i| (estimate(&nodes[i]), i));
        match seed {
            Some(i) => {
                bound[i] = true;
                steps.push(Step::Scan(i));
            }
            None => break,
        }
    }

    Plan { nodes, rels, node_vars, rel_vars, steps }
}

#[derive(Clone)]
struct Binding {
    nodes: Vec<Option<NodeId>>,
    rels: Vec<Option<EdgeId>>,
}

struct Search<'g> {
    graph: &'g FrozenGraph,
    plan: &'g Plan,
    out: Vec<Binding>,
}

impl<'g> Search<'g> {
    fn node_ok(&self, slot: usize, node: &Node) -> bool {
        let s = &self.plan.nodes[slot];
        s.labels.iter().all(|l| node.has_label(l))
            && s.props.iter().all(|(k, v)| {
                node.properties
                    .get(k)
                    .is_some_and(|p| compare_values(&Value::from(p), CompareOp::Eq, v))
            })
    }

    fn run(&mut self, depth: usize, b: &mut Binding) {
        let Some(step) = self.plan.steps.get(depth).copied() else {
            self.out.push(b.clone());
            return;
        };
        match step {
            Step::Scan(slot) => {
                let candidates: Vec<NodeId> = match self.plan.nodes[slot]
                    .labels
                    .iter()
                    .min_by_key(|l| self.graph.label_count(l))
                {
                    Some(l) => self.graph.label_members(l).collect(),
                    None => self.graph.nodes().iter().map(|n| n.id).collect(),
                };
                for id in candidates {
                    let node = self.graph.node(id).expect("indexed node exists");
                    if self.node_ok(slot, node) {
                        b.nodes[slot] = Some(id);
                        self.run(depth + 1, b);
                    }
                }
                b.nodes[slot] = None;
            }
            Step::Expand { rel, from_left } => {
                let r = &self.plan.rels[rel];
                let (here, there) = if from_left { (r.left, r.right) } else { (r.right, r.left) };
                let anchor = b.nodes[here].expect("expand starts from a bound node");
                let dir = match (r.direction, from_left) {
                    (RelDirection::Undirected, _) => Direction::Both,
                    (RelDirection::Outgoing, true) | (RelDirection::Incoming, false) => Direction::Outgoing,
                    (RelDirection::Outgoing, false) | (RelDirection::Incoming, true) => Direction::Incoming,
                };
                let there_was_bound = b.nodes[there].is_some();
                let edges: Vec<EdgeId> =
                    self.graph.incident_ids(anchor, r.rel_type.as_deref(), dir).collect();
                for eid in edges {
                    let used = self.plan.rels.iter().enumerate().any(|(j, other)| {
                        j != rel && other.clause == r.clause && b.rels[j] == Some(eid)
                    });
                    if used {
                        continue;
                    }
                    let edge = self.graph.edge(eid).expect("indexed edge exists");
                    let other = if edge.from == anchor { edge.to } else { edge.from };
                    if there_was_bound {
                        if b.nodes[there] != Some(other) {
                            continue;
                        }
                    } else {
                        let node = self.graph.node(other).expect("edge endpoint exists");
                        if !self.node_ok(there, node) {
                            continue;
                        }
                        b.nodes[there] = Some(other);
                    }
                    b.rels[rel] = Some(eid);
                    self.run(depth + 1, b);
                    b.rels[rel] = None;
                    if !there_was_bound {
                        b.nodes[there] = None;
                    }
                }
            }
        }
    }
}

struct Evaluator<'g> {
    graph: &'g FrozenGraph,
    plan: &'g Plan,
}

impl<'g> Evaluator<'g> {
    fn node_value(&self, id: NodeId) -> Value {
        let n = self.graph.node(id).expect("bound node exists");
        Value::Node(NodeRef { id, labels: n.labels.clone(), name: n.name().map(str::to_string) })
    }

    fn eval(&self, expr: &Expr, b: &Binding) -> Result<Value, CypherError> {
        match expr {
            Expr::Literal(l) => Ok(Value::from(l)),
            Expr::Variable(v) => {
                if let Some(&slot) = self.plan.node_vars.get(v) {
                    Ok(b.nodes[slot].map_or(Value::Null, |id| self.node_value(id)))
                } else if let Some(&slot) = self.plan.rel_vars.get(v) {
                    Ok(b.rels[slot].map_or(Value::Null, |id| {
                        let e = self.graph.edge(id).expect("bound edge exists");
                        Value::Relationship(RelRef {
                            id,
                            rel_type: e.rel_type.clone(),
                            from: e.from,
                            to: e.to,
                        })
                    }))
                } else {
                    Err(CypherError::Execution(format!("variable {v} is not bound")))
                }
            }
            Expr::Property { var, key } => {
                let props = if let Some(&slot) = self.plan.node_vars.get(var) {
                    b.nodes[slot].and_then(|id| self.graph.node(id)).map(|n| &n.properties)
                } else if let Some(&slot) = self.plan.rel_vars.get(var) {
                    b.rels[slot].and_then(|id| self.graph.edge(id)).map(|e| &e.properties)
                } else {
                    return Err(CypherError::Execution(format!("variable {var} is not bound")));
                };
                Ok(props.and_then(|p| p.get(key)).map_or(Value::Null, Value::from))
            }
            Expr::Count(_) | Expr::Collect(_) => Err(CypherError::Execution(format!(
                "aggregate {expr} used outside RETURN"
            ))),
        }
    }

    fn test(&self, cond: &BoolExpr, b: &Binding) -> Result<bool, CypherError> {
        Ok(match cond {
            BoolExpr::Compare { left, op, right } => {
                compare_values(&self.eval(left, b)?, *op, &self.eval(right, b)?)
            }
            BoolExpr::In { expr, list } => {
                let v = self.eval(expr, b)?;
                list.iter().any(|l| compare_values(&v, CompareOp::Eq, &Value::from(l)))
            }
            BoolExpr::Contains { expr, needle } => {
                matches!(self.eval(expr, b)?, Value::Text(s) if s.contains(needle.as_str()))
            }
            BoolExpr::And(items) => {
                for item in items {
                    if !self.test(item, b)? {
                        return Ok(false);
                    }
                }
                true
            }
            BoolExpr::Or(items) => {
                for item in items {
                    if self.test(item, b)? {
                        return Ok(true);
                    }
                }
                false
            }
            BoolExpr::Not(inner) => !self.test(inner, b)?,
        })
    }

    fn aggregate(&self, expr: &Expr, group: &[&Binding]) -> Result<Value, CypherError> {
        match expr {
            Expr::Count(None) => Ok(Value::Integer(group.len() as i64)),
            Expr::Count(Some(inner)) => {
                let mut n = 0;
                for b in group {
                    if !self.eval(inner, b)?.is_null() {
                        n += 1;
                    }
                }
                Ok(Value::Integer(n))
            }
            Expr::Collect(inner) => {
                let mut items = Vec::new();
                for b in group {
                    let v = self.eval(inner, b)?;
                    if !v.is_null() {
                        items.push(v);
                    }
                }
                Ok(Value::List(items))
            }
            other => match group.first() {
                Some(b) => self.eval(other, b),
                None => Ok(Value::Null),
            },
        }
    }
}

/// Where an ORDER BY key comes from.
enum SortSource {
    Column(usize),
    Binding(Expr),
}

pub fn execute(graph: &FrozenGraph, query: &Query) -> Result<ResultTable, CypherError> {
    let plan = compile(query, graph);
    let mut search = Search { graph, plan: &plan, out: Vec::new() };
    let mut seed = Binding { nodes: vec![None; plan.nodes.len()], rels: vec![None; plan.rels.len()] };
    search.run(0, &mut seed);
    let mut bindings = search.out;

    let eval = Evaluator { graph, plan: &plan };
    if let Some(cond) = &query.where_clause {
        let mut kept = Vec::with_capacity(bindings.len());
        for b in bindings {
            if eval.test(cond, &b)? {
                kept.push(b);
            }
        }
        bindings = kept;
    }
    // tie-break order: node ids in slot order (leftmost first), then edge ids
    bindings.sort_by(|a, b| a.nodes.cmp(&b.nodes).then_with(|| a.rels.cmp(&b.rels)));

    let columns = query.columns();
    let items = &query.returns.items;
    let sources: Vec<(SortSource, bool)> = query
        .order_by
        .iter()
        .map(|o| {
            let by_alias = match &o.expr {
                Expr::Variable(v) => items.iter().position(|i| i.alias.as_deref() == Some(v)),
                _ => None,
            };
            let col = by_alias.or_else(|| items.iter().position(|i| i.expr == o.expr));
            let src = match col {
                Some(c) => SortSource::Column(c),
                None => SortSource::Binding(o.expr.clone()),
            };
            (src, o.ascending)
        })
        .collect();

    // (cells, extra sort keys evaluated on the binding)
    let mut rows: Vec<(Vec<Value>, Vec<Value>)> = Vec::new();
    if query.is_aggregating() {
        let mut order: Vec<String> = Vec::new();
        let mut groups: HashMap<String, (Vec<Value>, Vec<&Binding>)> = HashMap::new();
        for b in &bindings {
            let mut keys = Vec::new();
            for item in items.iter().filter(|i| !i.expr.is_aggregate()) {
                keys.push(eval.eval(&item.expr, b)?);
            }
            let k: Vec<String> = keys.iter().map(Value::key).collect();
            let k = k.join("\u{1f}");
            groups
                .entry(k.clone())
                .or_insert_with(|| {
                    order.push(k);
                    (keys, Vec::new())
                })
                .1
                .push(b);
        }
        let has_keys = items.iter().any(|i| !i.expr.is_aggregate());
        if order.is_empty() && !has_keys {
            order.push(String::new());
            groups.insert(String::new(), (Vec::new(), Vec::new()));
        }
        for k in order {
            let (_, members) = &groups[&k];
            let mut cells = Vec::with_capacity(items.len());
            for item in items {
                cells.push(eval.aggregate(&item.expr, members)?);
            }
            rows.push((cells, Vec::new()));
        }
    } else {
        for b in &bindings {
            let mut cells = Vec::with_capacity(items.len());
            for item in items {
                cells.push(eval.eval(&item.expr, b)?);
            }
            let mut extra = Vec::new();
            for (src, _) in &sources {
                if let SortSource::Binding(e) = src {
                    extra.push(eval.eval(e, b)?);
                }
            }
            rows.push((cells, extra));
        }
    }

    if query.returns.distinct {
        let mut seen = std::collections::HashSet::new();
        rows.retain(|(cells, _)| {
            let k: Vec<String> = cells.iter().map(Value::key).collect();
            seen.insert(k.join("\u{1f}"))
        });
    }

    if !sources.is_empty() {
        rows.sort_by(|(ca, ea), (cb, eb)| {
            let mut extra_idx = 0;
            for (src, asc) in &sources {
                let (a, b) = match src {
                    SortSource::Column(c) => (&ca[*c], &cb[*c]),
                    SortSource::Binding(_) => {
                        let pair = (&ea[extra_idx], &eb[extra_idx]);
                        extra_idx += 1;
                        pair
                    }
                };
                let o = match (a.is_null(), b.is_null()) {
                    (true, true) => Ordering::Equal,
                    (true, false) => Ordering::Greater,
                    (false, true) => Ordering::Less,
                    (false, false) if *asc => order_values(a, b),
                    (false, false) => order_values(b, a),
                };
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        });
    }

    let mut rows: Vec<Vec<Value>> = rows.into_iter().map(|(cells, _)| cells).collect();
    if let Some(n) = query.limit {
        rows.truncate(n as usize);
    }
    Ok(ResultTable { columns, rows })
}
