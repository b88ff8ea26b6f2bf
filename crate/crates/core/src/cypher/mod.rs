//! Read-only Cypher subset: lexer, parser, schema validation, and executor.
//!
//! Query text -> [`tokenize`] -> [`parse`] -> [`validate`] -> [`execute`] -> [`ResultTable`]

pub mod ast;
mod error;
mod exec;
mod lexer;
mod parser;
mod validate;

pub use ast::Query;
pub use error::{CypherError, ErrorClass, Position, UnknownSymbol};
pub use exec::{compare_values, execute, order_values, NodeRef, RelRef, ResultTable, Value};
pub use lexer::{tokenize, Token, TokenKind, KEYWORDS, WRITE_KEYWORDS};
pub use parser::parse;
pub use validate::{validate, SchemaCatalog, ValidatedQuery};

/// Canonical single-line rendering of a query.
pub fn render_ast(query: &Query) -> String {
    query.to_string()
}
