//! Hostile or broken query strings and the class each must be rejected with.

use amkg_core::cypher::ErrorClass;
use amkg_core::nl::{guard, Engine};

pub const GUARD_SUITE: [(&str, ErrorClass); 15] = [
    ("MATCH (m:Material) DELETE m", ErrorClass::WriteClauseRejected),
    ("CREATE (m:Material {name: 'Unobtainium'})", ErrorClass::WriteClauseRejected),
    ("MATCH (m:Material) SET m.name = 'x' RETURN m.name", ErrorClass::WriteClauseRejected),
    ("MERGE (p:Process {name: 'Laser PBF'}) RETURN p.name", ErrorClass::WriteClauseRejected),
    ("MATCH (m:Material) DETACH DELETE m", ErrorClass::WriteClauseRejected),
    ("MATCH (m:Material) REMOVE m.synonyms RETURN m.name", ErrorClass::WriteClauseRejected),
    ("MATCH (m:Material {name: 'Inconel 718'}) RETURN m.tensile_strength_mpa", ErrorClass::UnknownProperty),
    ("MATCH (m:Material) WHERE m.hardness_hv > 300 RETURN m.name", ErrorClass::UnknownProperty),
    ("MATCH (p:Process {cost_usd: 500}) RETURN p.name", ErrorClass::UnknownProperty),
    ("MATCH (a:Alloy) RETURN a.name", ErrorClass::UnknownLabel),
    ("MATCH (m:Material)-[:MELTED_BY]->(p:Process) RETURN m.name", ErrorClass::UnknownRelType),
    ("MATCH (m:Material RETURN m.name", ErrorClass::Parse),
    ("MATCH (m:Material) RETURN", ErrorClass::Parse),
    ("MATCH (m:Material) RETURN q.name", ErrorClass::UnboundVariable),
    ("MATCH (m:Material) WHERE m.name = 'Inconel 718 RETURN m.name", ErrorClass::Lex),
];

/// Every suite string is rejected by the guard and by the engine's raw query path.
pub fn check_guard_suite(engine: &Engine) -> Result<usize, String> {
    for (text, class) in GUARD_SUITE {
        match guard(text, engine.schema()) {
            Err(e) if e.class() == class => {}
            Err(e) => return Err(format!("{text:?}: rejected as {:?}, expected {class:?}: {e}", e.class())),
            Ok(_) => return Err(format!("{text:?}: passed the guard")),
        }
        match engine.run_cypher(text) {
            Err(e) if e.class() == class => {}
            other => return Err(format!("{text:?}: engine returned {other:?}")),
        }
    }
    Ok(GUARD_SUITE.len())
}
