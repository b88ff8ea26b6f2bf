//! Query AST for the read-only subset, plus its canonical single-line rendering.
//!
//! `Display` is the canonical form: keywords upper-case, one space between
//! clauses, `{key: value}` maps, single-quoted strings, `ASC` omitted.
//! Rendering a parsed query and parsing it again yields an equal AST.

use std::fmt::{self, Write};

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub matches: Vec<MatchClause>,
    pub where_clause: Option<BoolExpr>,
    pub returns: ReturnClause,
    pub order_by: Vec<OrderItem>,
    pub limit: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchClause {
    pub patterns: Vec<Pattern>,
}

/// `node (rel node)*`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub start: NodePattern,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub rel: RelPattern,
    pub node: NodePattern,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodePattern {
    pub var: Option<String>,
    pub label: Option<String>,
    pub properties: Vec<(String, Literal)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelDirection {
    /// `-[]->`
    Outgoing,
    /// `<-[]-`
    Incoming,
    /// `-[]-`
    Undirected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelPattern {
    pub var: Option<String>,
    pub rel_type: Option<String>,
    pub direction: RelDirection,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Text(String),
    Integer(i64),
    Float(f64),
    Boolean(bool),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Property { var: String, key: String },
    Variable(String),
    Literal(Literal),
    /// `None` is `count(*)`.
    Count(Option<Box<Expr>>),
    Collect(Box<Expr>),
}

impl Expr {
    pub fn is_aggregate(&self) -> bool {
        matches!(self, Expr::Count(_) | Expr::Collect(_))
    }

    /// Variable this expression reads, if any.
    pub fn variable(&self) -> Option<&str> {
        match self {
            Expr::Property { var, .. } | Expr::Variable(var) => Some(var),
            Expr::Count(Some(inner)) | Expr::Collect(inner) => inner.variable(),
            Expr::Count(None) | Expr::Literal(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "<>",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "=" => CompareOp::Eq,
            "<>" => CompareOp::Ne,
            "<" => CompareOp::Lt,
            "<=" => CompareOp::Le,
            ">" => CompareOp::Gt,
            ">=" => CompareOp::Ge,
            _ => return None,
        })
    }
}

/// `AND`/`OR` are n-ary so that `a AND b AND c` and `a AND (b AND c)` stay
/// distinct trees and both render back to what was parsed.
#[derive(Debug, Clone, PartialEq)]
pub enum BoolExpr {
    Compare { left: Expr, op: CompareOp, right: Expr },
    In { expr: Expr, list: Vec<Literal> },
    Contains { expr: Expr, needle: String },
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
    Not(Box<BoolExpr>),
}

impl BoolExpr {
    pub fn visit_exprs<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        match self {
            BoolExpr::Compare { left, right, .. } => {
                f(left);
                f(right);
            }
            BoolExpr::In { expr, .. } | BoolExpr::Contains { expr, .. } => f(expr),
            BoolExpr::And(items) | BoolExpr::Or(items) => {
                items.iter().for_each(|b| b.visit_exprs(f))
            }
            BoolExpr::Not(inner) => inner.visit_exprs(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnClause {
    pub distinct: bool,
    pub items: Vec<ReturnItem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnItem {
    pub expr: Expr,
    pub alias: Option<String>,
}

impl ReturnItem {
    pub fn column_name(&self) -> String {
        self.alias.clone().unwrap_or_else(|| self.expr.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderItem {
    pub expr: Expr,
    pub ascending: bool,
}

impl Query {
    pub fn patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.matches.iter().flat_map(|m| m.patterns.iter())
    }

    pub fn node_patterns(&self) -> impl Iterator<Item = &NodePattern> {
        self.patterns()
            .flat_map(|p| std::iter::once(&p.start).chain(p.steps.iter().map(|s| &s.node)))
    }

    pub fn rel_patterns(&self) -> impl Iterator<Item = &RelPattern> {
        self.patterns().flat_map(|p| p.steps.iter().map(|s| &s.rel))
    }

    pub fn columns(&self) -> Vec<String> {
        self.returns.items.iter().map(ReturnItem::column_name).collect()
    }

    pub fn is_aggregating(&self) -> bool {
        self.returns.items.iter().any(|i| i.expr.is_aggregate())
    }
}

pub(crate) fn write_string_literal(out: &mut impl Write, s: &str) -> fmt::Result {
    out.write_char('\'')?;
    for c in s.chars() {
        match c {
            '\'' => out.write_str("\\'")?,
            '\\' => out.write_str("\\\\")?,
            '\n' => out.write_str("\\n")?,
            '\t' => out.write_str("\\t")?,
            '\r' => out.write_str("\\r")?,
            c => out.write_char(c)?,
        }
    }
    out.write_char('\'')
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Text(s) => write_string_literal(f, s),
            Literal::Integer(v) => write!(f, "{v}"),
            // Debug keeps a decimal point or exponent, so the value re-lexes as a float
            Literal::Float(v) => write!(f, "{v:?}"),
            Literal::Boolean(true) => f.write_str("TRUE"),
            Literal::Boolean(false) => f.write_str("FALSE"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Property { var, key } => write!(f, "{var}.{key}"),
            Expr::Variable(v) => f.write_str(v),
            Expr::Literal(l) => write!(f, "{l}"),
            Expr::Count(None) => f.write_str("count(*)"),
            Expr::Count(Some(e)) => write!(f, "count({e})"),
            Expr::Collect(e) => write!(f, "collect({e})"),
        }
    }
}

impl fmt::Display for NodePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_char('(')?;
        if let Some(v) = &self.var {
            f.write_str(v)?;
        }
        if let Some(l) = &self.label {
            write!(f, ":{l}")?;
        }
        if !self.properties.is_empty() {
            if self.var.is_some() || self.label.is_some() {
                f.write_char(' ')?;
            }
            f.write_char('{')?;
            for (i, (k, v)) in self.properties.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{k}: {v}")?;
            }
            f.write_char('}')?;
        }
        f.write_char(')')
    }
}

impl fmt::Display for RelPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut inner = String::new();
        if let Some(v) = &self.var {
            inner.push_str(v);
        }
        if let Some(t) = &self.rel_type {
            inner.push(':');
            inner.push_str(t);
        }
        match self.direction {
            RelDirection::Outgoing => write!(f, "-[{inner}]->"),
            RelDirection::Incoming => write!(f, "<-[{inner}]-"),
            RelDirection::Undirected => write!(f, "-[{inner}]-"),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        for step in &self.steps {
            write!(f, "{}{}", step.rel, step.node)?;
        }
        Ok(())
    }
}

impl BoolExpr {
    fn fmt_child(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolExpr::And(_) | BoolExpr::Or(_) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolExpr::Compare { left, op, right } => write!(f, "{left} {} {right}", op.symbol()),
            BoolExpr::In { expr, list } => {
                write!(f, "{expr} IN [")?;
                for (i, l) in list.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{l}")?;
                }
                f.write_char(']')
            }
            BoolExpr::Contains { expr, needle } => {
                write!(f, "{expr} CONTAINS ")?;
                write_string_literal(f, needle)
            }
            BoolExpr::And(items) | BoolExpr::Or(items) => {
                let sep = if matches!(self, BoolExpr::And(_)) { " AND " } else { " OR " };
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    item.fmt_child(f)?;
                }
                Ok(())
            }
            BoolExpr::Not(inner) => {
                f.write_str("NOT ")?;
                inner.fmt_child(f)
            }
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.matches.iter().enumerate() {
            if i > 0 {
                f.write_char(' ')?;
            }
            f.write_str("MATCH ")?;
            for (j, p) in m.patterns.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{p}")?;
            }
        }
        if let Some(w) = &self.where_clause {
            write!(f, " WHERE {w}")?;
        }
        f.write_str(" RETURN ")?;
        if self.returns.distinct {
            f.write_str("DISTINCT ")?;
        }
        for (i, item) in self.returns.items.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", item.expr)?;
            if let Some(a) = &item.alias {
                write!(f, " AS {a}")?;
            }
        }
        if !self.order_by.is_empty() {
            f.write_str(" ORDER BY ")?;
            for (i, o) in self.order_by.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", o.expr)?;
                if !o.ascending {
                    f.write_str(" DESC")?;
                }
            }
        }
        if let Some(n) = self.limit {
            write!(f, " LIMIT {n}")?;
        }
        Ok(())
    }
}
