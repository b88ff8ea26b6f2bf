//! Schema conformance check: every label, relationship type, and property a
//! query mentions must exist in the catalog.

use std::collections::HashMap;
use std::ops::Deref;

use super::ast::{Expr, Query};
use super::error::{CypherError, UnknownSymbol};

/// What the validator needs to know about a graph schema.
pub trait SchemaCatalog {
    fn has_label(&self, label: &str) -> bool;
    fn has_rel_type(&self, rel_type: &str) -> bool;
    fn label_has_property(&self, label: &str, key: &str) -> bool;
    fn rel_has_property(&self, rel_type: &str, key: &str) -> bool;
    /// Property known on any label (for unlabeled node variables).
    fn any_label_has_property(&self, key: &str) -> bool;
    /// Property known on any relationship type (for untyped relationship variables).
    fn any_rel_has_property(&self, key: &str) -> bool;
}

/// A query that passed [`validate`]. Only obtainable through validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedQuery(Query);

impl ValidatedQuery {
    pub fn query(&self) -> &Query {
        &self.0
    }

    pub fn into_inner(self) -> Query {
        self.0
    }
}

impl Deref for ValidatedQuery {
    type Target = Query;
    fn deref(&self) -> &Query {
        &self.0
    }
}

enum Binding<'q> {
    Node(Vec<&'q str>),
    Rel(Vec<&'q str>),
}

pub fn validate(query: Query, schema: &impl SchemaCatalog) -> Result<ValidatedQuery, CypherError> {
    let mut unknown: Vec<UnknownSymbol> = Vec::new();
    let push = |s: UnknownSymbol, unknown: &mut Vec<UnknownSymbol>| {
        if !unknown.contains(&s) {
            unknown.push(s);
        }
    };

    let mut bindings: HashMap<&str, Binding> = HashMap::new();
    for node in query.node_patterns() {
        if let Some(label) = &node.label {
            if !schema.has_label(label) {
                push(UnknownSymbol::Label(label.clone()), &mut unknown);
            }
        }
        if let Some(var) = &node.var {
            let entry = bindings.entry(var).or_insert_with(|| Binding::Node(Vec::new()));
            if let (Binding::Node(labels), Some(l)) = (entry, &node.label) {
                if !labels.contains(&l.as_str()) {
                    labels.push(l);
                }
            }
        }
    }
    for rel in query.rel_patterns() {
        if let Some(t) = &rel.rel_type {
            if !schema.has_rel_type(t) {
                push(UnknownSymbol::RelType(t.clone()), &mut unknown);
            }
        }
        if let Some(var) = &rel.var {
            bindings.insert(var, Binding::Rel(rel.rel_type.as_deref().into_iter().collect()));
        }
    }

    let node_key_known = |labels: &[&str], key: &str| {
        if labels.is_empty() {
            schema.any_label_has_property(key)
        } else {
            labels.iter().any(|l| schema.label_has_property(l, key))
        }
    };

    for node in query.node_patterns() {
        let labels: Vec<&str> = match node.var.as_deref().and_then(|v| bindings.get(v)) {
            Some(Binding::Node(ls)) => ls.clone(),
            _ => node.label.as_deref().into_iter().collect(),
        };
        for (key, _) in &node.properties {
            if !node_key_known(&labels, key) {
                let owner = labels.first().map(|s| s.to_string());
                push(UnknownSymbol::Property { owner, key: key.clone() }, &mut unknown);
            }
        }
    }

    let mut exprs: Vec<&Expr> = Vec::new();
    if let Some(w) = &query.where_clause {
        w.visit_exprs(&mut |e| exprs.push(e));
    }
    exprs.extend(query.returns.items.iter().map(|i| &i.expr));
    exprs.extend(query.order_by.iter().map(|o| &o.expr));
    for expr in exprs {
        let (var, key) = match expr {
            Expr::Property { var, key } => (var, key),
            Expr::Count(Some(inner)) | Expr::Collect(inner) => match inner.as_ref() {
                Expr::Property { var, key } => (var, key),
                _ => continue,
            },
            _ => continue,
        };
        let (known, owner) = match bindings.get(var.as_str()) {
            Some(Binding::Node(labels)) => (node_key_known(labels, key), labels.first().copied()),
            Some(Binding::Rel(types)) => match types.first() {
                Some(t) => (schema.rel_has_property(t, key), Some(*t)),
                None => (schema.any_rel_has_property(key), None),
            },
            None => continue,
        };
        if !known {
            push(
                UnknownSymbol::Property { owner: owner.map(str::to_string), key: key.clone() },
                &mut unknown,
            );
        }
    }

    if unknown.is_empty() {
        Ok(ValidatedQuery(query))
    } else {
        Err(CypherError::Schema(unknown))
    }
}
