//! The only route from query text to an executable query.

use crate::cypher::{parse, validate, CypherError, ValidatedQuery};
use crate::domain::SchemaDescriptor;

/// Parses (rejecting write clauses) and validates against the schema.
pub fn guard(cypher: &str, schema: &SchemaDescriptor) -> Result<ValidatedQuery, CypherError> {
    validate(parse(cypher)?, schema)
}
