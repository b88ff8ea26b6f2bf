//! Shipped exemplar bank checks.

use amkg_core::cypher::execute;
use amkg_core::nl::{guard, Engine, IntentCategory};

/// Returns (positives, negatives) after checking guard validity and sizes.
pub fn check_bank(engine: &Engine) -> Result<(usize, usize), String> {
    let bank = engine.bank();
    for e in bank.positives() {
        let validated = guard(&e.cypher, engine.schema()).map_err(|err| format!("{:?}: {err}", e.cypher))?;
        let table = execute(engine.graph(), validated.query()).map_err(|err| format!("{:?}: {err}", e.cypher))?;
        if table.rows.is_empty() {
            return Err(format!("{:?} returns no rows on the seed graph", e.cypher));
        }
    }
    for category in IntentCategory::PRECEDENCE {
        let n = bank.in_category(category).filter(|e| !e.is_negative()).count();
        if n < 6 {
            return Err(format!("{category:?} has {n} positive exemplars"));
        }
    }
    let negatives = bank.negatives().count();
    if negatives < 4 {
        return Err(format!("{negatives} negative exemplars"));
    }
    Ok((bank.positives().count(), negatives))
}
