//! Recursive-descent parser for the read-only Cypher subset.
//!
//! ```text
//! query        := match_clause+ where_clause? return_clause order_clause? limit_clause?
//! match_clause := MATCH pattern ("," pattern)*
//! pattern      := node_pat (rel_pat node_pat)*
//! node_pat     := "(" ident? (":" ident)? prop_map? ")"
//! rel_pat      := "-[" ident? (":" ident)? "]->" | "<-[" ... "]-" | "-[" ... "]-"
//! where_clause := WHERE bool_expr            -- NOT > AND > OR
//! return_clause:= RETURN DISTINCT? expr (AS ident)? ("," ...)*
//! order_clause := ORDER BY expr (ASC|DESC)? ("," ...)*
//! limit_clause := LIMIT integer
//! ```

use std::collections::{HashMap, HashSet};

use super::ast::*;
use super::error::{CypherError, Position};
use super::lexer::{tokenize, Token, TokenKind, WRITE_KEYWORDS};

pub fn parse(text: &str) -> Result<Query, CypherError> {
    let tokens = tokenize(text)?;
    reject_writes(text, &tokens)?;
    let mut parser = Parser { text, tokens, pos: 0, spans: Vec::new() };
    let query = parser.query()?;
    check_semantics(text, &query, &parser.spans)?;
    Ok(query)
}

/// A write keyword is a clause head unless it is used as a label, a property
/// key (`x.set`), or a map key (`{set: 1}`).
fn reject_writes(text: &str, tokens: &[Token]) -> Result<(), CypherError> {
    for (i, tok) in tokens.iter().enumerate() {
        if tok.kind != TokenKind::Keyword || !WRITE_KEYWORDS.contains(&tok.text.as_str()) {
            continue;
        }
        let prev_is_name_context = i > 0 && (tokens[i - 1].is_punct(".") || tokens[i - 1].is_punct(":"));
        let next_is_colon = tokens.get(i + 1).is_some_and(|t| t.is_punct(":"));
        let in_map = next_is_colon && i > 0 && (tokens[i - 1].is_punct("{") || tokens[i - 1].is_punct(","));
        if !(prev_is_name_context || in_map) {
            return Err(CypherError::WriteClauseRejected {
                keyword: tok.text.clone(),
                at: Position::of(text, tok.offset),
            });
        }
    }
    Ok(())
}

/// Where each variable reference was seen, for error positions.
struct VarSpan {
    name: String,
    offset: usize,
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    spans: Vec<VarSpan>,
}

type PResult<T> = Result<T, CypherError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&Token> {
        self.tokens.get(self.pos + n)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.text.len(), |t| t.offset)
    }

    fn error(&self, expected: &[&str]) -> CypherError {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(t) if t.kind == TokenKind::StringLiteral => format!("string '{}'", t.text),
            Some(t) => format!("'{}'", t.text),
        };
        CypherError::Parse {
            at: Position::of(self.text, self.offset()),
            found,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn semantic(&self, offset: usize, message: impl Into<String>) -> CypherError {
        CypherError::Semantic { at: Position::of(self.text, offset), message: message.into() }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(kw))
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        let hit = self.at_keyword(kw);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.at_punct(p);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(&[p]))
        }
    }

    fn identifier(&mut self) -> PResult<String> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                let name = t.text.clone();
                self.spans.push(VarSpan { name: name.clone(), offset: t.offset });
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    /// Label, relationship type, or property key: keywords allowed.
    fn word(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(t) if t.is_word() => {
                let w = if t.kind == TokenKind::Keyword {
                    // keywords are upper-cased by the lexer; recover source spelling
                    self.text[t.offset..t.offset + t.text.len()].to_string()
                } else {
                    t.text.clone()
                };
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn query(&mut self) -> PResult<Query> {
        if !self.at_keyword("MATCH") {
            return Err(self.error(&["MATCH"]));
        }
        let mut matches = Vec::new();
        while self.eat_keyword("MATCH") {
            let mut patterns = vec![self.pattern()?];
            while self.eat_punct(",") {
                patterns.push(self.pattern()?);
            }
            matches.push(MatchClause { patterns });
        }
        let where_clause = if self.eat_keyword("WHERE") { Some(self.or_expr()?) } else { None };
        if !self.eat_keyword("RETURN") {
            let expected: &[&str] = if where_clause.is_some() {
                &["AND", "OR", "RETURN"]
            } else {
                &["MATCH", "WHERE", "RETURN", ","]
            };
            return Err(self.error(expected));
        }
        let distinct = self.eat_keyword("DISTINCT");
        let mut items = vec![self.return_item()?];
        while self.eat_punct(",") {
            items.push(self.return_item()?);
        }
        let mut order_by = Vec::new();
        if self.eat_keyword("ORDER") {
            if !self.eat_keyword("BY") {
                return Err(self.error(&["BY"]));
            }
            loop {
                let expr = self.value_expr(true)?;
                let ascending = if self.eat_keyword("DESC") {
                    false
                } else {
                    self.eat_keyword("ASC");
                    true
                };
                order_by.push(OrderItem { expr, ascending });
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        let limit = if self.eat_keyword("LIMIT") {
            match self.peek() {
                Some(t) if t.kind == TokenKind::NumberLiteral => {
                    let n = t.text.parse::<u64>().map_err(|_| self.error(&["non-negative integer"]))?;
                    self.pos += 1;
                    Some(n)
                }
                _ => return Err(self.error(&["non-negative integer"])),
            }
        } else {
            None
        };
        self.eat_punct(";");
        if self.peek().is_some() {
            let mut expected = vec![","];
            if order_by.is_empty() && limit.is_none() {
                expected.extend(["AS", "ORDER", "LIMIT"]);
            } else if limit.is_none() {
                expected.extend(["ASC", "DESC", "LIMIT"]);
            }
            expected.push("end of input");
            return Err(self.error(&expected));
        }
        Ok(Query {
            matches,
            where_clause,
            returns: ReturnClause { distinct, items },
            order_by,
            limit,
        })
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        let start = self.node_pattern()?;
        let mut steps = Vec::new();
        while self.at_punct("-") || self.at_punct("<") {
            let rel = self.rel_pattern()?;
            let node = self.node_pattern()?;
            steps.push(Step { rel, node });
        }
        Ok(Pattern { start, steps })
    }

    fn node_pattern(&mut self) -> PResult<NodePattern> {
        if !self.eat_punct("(") {
            return Err(self.error(&["("]));
        }
        let var = match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => Some(self.identifier()?),
            _ => None,
        };
        let label = if self.eat_punct(":") { Some(self.word("label")?) } else { None };
        let properties = if self.at_punct("{") { self.prop_map()? } else { Vec::new() };
        if !self.eat_punct(")") {
            let mut expected = Vec::new();
            if var.is_none() && label.is_none() && properties.is_empty() {
                expected.push("identifier");
            }
            if label.is_none() && properties.is_empty() {
                expected.push(":");
            }
            if properties.is_empty() {
                expected.push("{");
            }
            expected.push(")");
            return Err(self.error(&expected));
        }
        Ok(NodePattern { var, label, properties })
    }

    fn rel_pattern(&mut self) -> PResult<RelPattern> {
        let incoming = self.eat_punct("<");
        self.expect_punct("-")?;
        if !self.eat_punct("[") {
            return Err(self.error(&["["]));
        }
        let var = match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => Some(self.identifier()?),
            _ => None,
        };
        let rel_type = if self.eat_punct(":") { Some(self.word("relationship type")?) } else { None };
        if !self.eat_punct("]") {
            let expected: &[&str] = match (&var, &rel_type) {
                (None, None) => &["identifier", ":", "]"],
                (Some(_), None) => &[":", "]"],
                _ => &["]"],
            };
            return Err(self.error(expected));
        }
        self.expect_punct("-")?;
        let outgoing = self.at_punct(">");
        let direction = match (incoming, outgoing) {
            (true, true) => {
                return Err(self.semantic(self.offset(), "relationship cannot point both ways"));
            }
            (true, false) => RelDirection::Incoming,
            (false, true) => {
                self.pos += 1;
                RelDirection::Outgoing
            }
            (false, false) => RelDirection::Undirected,
        };
        Ok(RelPattern { var, rel_type, direction })
    }

    fn prop_map(&mut self) -> PResult<Vec<(String, Literal)>> {
        self.expect_punct("{")?;
        let mut props = Vec::new();
        loop {
            let key = self.word("property key")?;
            self.expect_punct(":")?;
            let value = self.literal()?;
            props.push((key, value));
            if self.eat_punct("}") {
                return Ok(props);
            }
            if !self.eat_punct(",") {
                return Err(self.error(&[",", "}"]));
            }
        }
    }

    fn at_literal(&self) -> bool {
        match self.peek() {
            Some(t) => {
                matches!(t.kind, TokenKind::StringLiteral | TokenKind::NumberLiteral)
                    || t.is_keyword("TRUE")
                    || t.is_keyword("FALSE")
                    || (t.is_punct("-")
                        && self.peek_at(1).is_some_and(|n| n.kind == TokenKind::NumberLiteral))
            }
            None => false,
        }
    }

    fn literal(&mut self) -> PResult<Literal> {
        let negative = self.at_punct("-")
            && self.peek_at(1).is_some_and(|n| n.kind == TokenKind::NumberLiteral);
        if negative {
            self.pos += 1;
        }
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error(&["literal"]));
        };
        let lit = match tok.kind {
            TokenKind::StringLiteral => Literal::Text(tok.text.clone()),
            TokenKind::NumberLiteral => number_literal(&tok.text, negative)
                .ok_or_else(|| self.semantic(tok.offset, format!("number {} out of range", tok.text)))?,
            _ if tok.is_keyword("TRUE") => Literal::Boolean(true),
            _ if tok.is_keyword("FALSE") => Literal::Boolean(false),
            _ => return Err(self.error(&["string", "number", "TRUE", "FALSE"])),
        };
        self.pos += 1;
        Ok(lit)
    }

    fn or_expr(&mut self) -> PResult<BoolExpr> {
        let mut items = vec![self.and_expr()?];
        while self.eat_keyword("OR") {
            items.push(self.and_expr()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { BoolExpr::Or(items) })
    }

    fn and_expr(&mut self) -> PResult<BoolExpr> {
        let mut items = vec![self.not_expr()?];
        while self.eat_keyword("AND") {
            items.push(self.not_expr()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { BoolExpr::And(items) })
    }

    fn not_expr(&mut self) -> PResult<BoolExpr> {
        if self.eat_keyword("NOT") {
            return Ok(BoolExpr::Not(Box::new(self.not_expr()?)));
        }
        if self.eat_punct("(") {
            let inner = self.or_expr()?;
            if !self.eat_punct(")") {
                return Err(self.error(&["AND", "OR", ")"]));
            }
            return Ok(inner);
        }
        self.comparison()
    }

    fn comparison(&mut self) -> PResult<BoolExpr> {
        let left = self.operand()?;
        if self.eat_keyword("IN") {
            self.expect_punct("[")?;
            let mut list = Vec::new();
            if !self.eat_punct("]") {
                loop {
                    list.push(self.literal()?);
                    if self.eat_punct("]") {
                        break;
                    }
                    if !self.eat_punct(",") {
                        return Err(self.error(&[",", "]"]));
                    }
                }
            }
            return Ok(BoolExpr::In { expr: left, list });
        }
        if self.eat_keyword("CONTAINS") {
            return match self.peek() {
                Some(t) if t.kind == TokenKind::StringLiteral => {
                    let needle = t.text.clone();
                    self.pos += 1;
                    Ok(BoolExpr::Contains { expr: left, needle })
                }
                _ => Err(self.error(&["string"])),
            };
        }
        let op = match self.peek().filter(|t| t.kind == TokenKind::Operator) {
            Some(t) => CompareOp::from_symbol(&t.text),
            None => None,
        };
        let Some(op) = op else {
            return Err(self.error(&["=", "<>", "<", "<=", ">", ">=", "IN", "CONTAINS"]));
        };
        self.pos += 1;
        let right = self.operand()?;
        Ok(BoolExpr::Compare { left, op, right })
    }

    fn operand(&mut self) -> PResult<Expr> {
        if self.at_literal() {
            return Ok(Expr::Literal(self.literal()?));
        }
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => self.value_expr(false),
            _ => Err(self.error(&["identifier", "literal"])),
        }
    }

    /// `ident`, `ident.key`, and (when `aggregates`) `count(...)` / `collect(...)`.
    fn value_expr(&mut self, aggregates: bool) -> PResult<Expr> {
        if aggregates && (self.at_keyword("COUNT") || self.at_keyword("COLLECT")) {
            let is_count = self.at_keyword("COUNT");
            self.pos += 1;
            self.expect_punct("(")?;
            let expr = if is_count && self.eat_punct("*") {
                Expr::Count(None)
            } else {
                let inner = self.value_expr(false)?;
                if is_count {
                    Expr::Count(Some(Box::new(inner)))
                } else {
                    Expr::Collect(Box::new(inner))
                }
            };
            self.expect_punct(")")?;
            return Ok(expr);
        }
        let var = match self.identifier() {
            Ok(v) => v,
            Err(_) if aggregates => return Err(self.error(&["identifier", "count", "collect"])),
            Err(e) => return Err(e),
        };
        if self.eat_punct(".") {
            let key = self.word("property key")?;
            Ok(Expr::Property { var, key })
        } else {
            Ok(Expr::Variable(var))
        }
    }

    fn return_item(&mut self) -> PResult<ReturnItem> {
        let expr = self.value_expr(true)?;
        let alias = if self.eat_keyword("AS") {
            match self.peek() {
                Some(t) if t.kind == TokenKind::Identifier => {
                    let a = t.text.clone();
                    self.pos += 1;
                    Some(a)
                }
                _ => return Err(self.error(&["identifier"])),
            }
        } else {
            None
        };
        Ok(ReturnItem { expr, alias })
    }
}

fn number_literal(text: &str, negative: bool) -> Option<Literal> {
    if text.contains(['.', 'e', 'E']) {
        let v: f64 = text.parse().ok()?;
        let v = if negative { -v } else { v };
        v.is_finite().then_some(Literal::Float(v))
    } else {
        let v: i128 = text.parse().ok()?;
        let v = if negative { -v } else { v };
        i64::try_from(v).ok().map(Literal::Integer)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum VarKind {
    Node,
    Rel,
}

fn check_semantics<'q>(text: &str, q: &'q Query, spans: &[VarSpan]) -> PResult<()> {
    let at = |name: &str| {
        let offset = spans.iter().rev().find(|s| s.name == name).map_or(0, |s| s.offset);
        Position::of(text, offset)
    };
    let mut kinds: HashMap<&str, VarKind> = HashMap::new();
    let mut bind = |name: &'q str, kind: VarKind| -> PResult<()> {
        match kinds.insert(name, kind) {
            Some(VarKind::Rel) if kind == VarKind::Rel => Err(CypherError::Semantic {
                at: at(name),
                message: format!("relationship variable {name} is bound more than once"),
            }),
            Some(prev) if prev != kind => Err(CypherError::Semantic {
                at: at(name),
                message: format!("variable {name} is used as both a node and a relationship"),
            }),
            _ => Ok(()),
        }
    };
    for pattern in q.patterns() {
        if let Some(v) = &pattern.start.var {
            bind(v, VarKind::Node)?;
        }
        for step in &pattern.steps {
            if let Some(v) = &step.rel.var {
                bind(v, VarKind::Rel)?;
            }
            if let Some(v) = &step.node.var {
                bind(v, VarKind::Node)?;
            }
        }
    }

    let check_bound = |expr: &Expr| -> PResult<()> {
        match expr.variable() {
            Some(v) if !kinds.contains_key(v) => {
                Err(CypherError::UnboundVariable { name: v.to_string(), at: at(v) })
            }
            _ => Ok(()),
        }
    };
    if let Some(w) = &q.where_clause {
        let mut result = Ok(());
        w.visit_exprs(&mut |e| {
            if result.is_ok() {
                result = check_bound(e);
            }
        });
        result?;
    }
    for item in &q.returns.items {
        check_bound(&item.expr)?;
    }

    let mut columns = HashSet::new();
    for item in &q.returns.items {
        let name = item.column_name();
        if !columns.insert(name.clone()) {
            return Err(CypherError::Semantic {
                at: Position::of(text, 0),
                message: format!("duplicate result column {name}"),
            });
        }
    }

    let aliases: HashSet<&str> = q.returns.items.iter().filter_map(|i| i.alias.as_deref()).collect();
    let projected_only = q.is_aggregating() || q.returns.distinct;
    for order in &q.order_by {
        if let Expr::Variable(v) = &order.expr {
            if aliases.contains(v.as_str()) {
                continue;
            }
        }
        if q.returns.items.iter().any(|i| i.expr == order.expr) {
            continue;
        }
        if order.expr.is_aggregate() || projected_only {
            return Err(CypherError::Semantic {
                at: Position::of(text, 0),
                message: format!(
                    "ORDER BY {} must name a returned column when aggregating or using DISTINCT",
                    order.expr
                ),
            });
        }
        check_bound(&order.expr)?;
    }
    Ok(())
}
