use std::fmt;

use thiserror::Error;

/// 1-based line/column plus the byte offset into the query text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl Position {
    pub fn of(text: &str, offset: usize) -> Self {
        let offset = offset.min(text.len());
        let before = &text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Position { offset, line, column }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnknownSymbol {
    Label(String),
    RelType(String),
    Property { owner: Option<String>, key: String },
}

impl fmt::Display for UnknownSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownSymbol::Label(l) => write!(f, "unknown label {l}"),
            UnknownSymbol::RelType(r) => write!(f, "unknown relationship type {r}"),
            UnknownSymbol::Property { owner: Some(o), key } => {
                write!(f, "unknown property {key} on {o}")
            }
            UnknownSymbol::Property { owner: None, key } => write!(f, "unknown property {key}"),
        }
    }
}

/// Coarse error class, used by callers that only care about the category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorClass {
    Lex,
    Parse,
    UnboundVariable,
    WriteClauseRejected,
    UnknownLabel,
    UnknownRelType,
    UnknownProperty,
    Execution,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CypherError {
    #[error("lex error at {at}: {message}")]
    Lex { at: Position, message: String },
    #[error("parse error at {at}: found {found}, expected one of: {}", expected.join(", "))]
    Parse {
        at: Position,
        found: String,
        expected: Vec<String>,
    },
    #[error("invalid query at {at}: {message}")]
    Semantic { at: Position, message: String },
    #[error("unbound variable {name} at {at}")]
    UnboundVariable { name: String, at: Position },
    #[error("write clause {keyword} rejected at {at}: only read-only queries are allowed")]
    WriteClauseRejected { keyword: String, at: Position },
    #[error("query does not conform to the schema: {}", join_symbols(.0))]
    Schema(Vec<UnknownSymbol>),
    #[error("execution error: {0}")]
    Execution(String),
}

fn join_symbols(symbols: &[UnknownSymbol]) -> String {
    symbols.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl CypherError {
    /// Schema errors report the class of their first unknown symbol.
    pub fn class(&self) -> ErrorClass {
        match self {
            CypherError::Lex { .. } => ErrorClass::Lex,
            CypherError::Parse { .. } | CypherError::Semantic { .. } => ErrorClass::Parse,
            CypherError::UnboundVariable { .. } => ErrorClass::UnboundVariable,
            CypherError::WriteClauseRejected { .. } => ErrorClass::WriteClauseRejected,
            CypherError::Schema(symbols) => match symbols.first() {
                Some(UnknownSymbol::Label(_)) => ErrorClass::UnknownLabel,
                Some(UnknownSymbol::RelType(_)) => ErrorClass::UnknownRelType,
                _ => ErrorClass::UnknownProperty,
            },
            CypherError::Execution(_) => ErrorClass::Execution,
        }
    }

    pub fn unknown_symbols(&self) -> &[UnknownSymbol] {
        match self {
            CypherError::Schema(s) => s,
            _ => &[],
        }
    }
}
