//! Render/reparse checks over a query corpus.

use amkg_core::cypher::{parse, render_ast, ErrorClass};
use amkg_core::nl::ExemplarBank;

use super::fuzz::{grammar_strings, write_strings};
use super::golden::CASES;

pub const FUZZ_COUNT: usize = 1000;
pub const FUZZ_SEED: u64 = 0xc0ffee;

/// Exemplar and golden Cypher texts.
pub fn golden_corpus() -> Vec<String> {
    let bank = ExemplarBank::shipped().expect("shipped bank");
    bank.positives().map(|e| e.cypher.clone()).chain(CASES.iter().map(|c| c.cypher.to_string())).collect()
}

pub fn roundtrip(text: &str) -> Result<(), String> {
    let first = parse(text).map_err(|e| format!("{text:?} does not parse: {e}"))?;
    let rendered = render_ast(&first);
    let second = parse(&rendered).map_err(|e| format!("rendering {rendered:?} of {text:?} does not parse: {e}"))?;
    if first != second {
        return Err(format!("{text:?} reparsed differently from {rendered:?}"));
    }
    if render_ast(&second) != rendered {
        return Err(format!("{rendered:?} is not a fixed point"));
    }
    Ok(())
}

/// Returns (round-tripped, write-rejected) counts.
pub fn check_roundtrip() -> Result<(usize, usize), String> {
    let corpus: Vec<String> = golden_corpus().into_iter().chain(grammar_strings(FUZZ_COUNT, FUZZ_SEED)).collect();
    let failures: Vec<String> = corpus.iter().filter_map(|q| roundtrip(q).err()).collect();
    if !failures.is_empty() {
        return Err(format!("{} of {} failed:\n{}", failures.len(), corpus.len(), failures.join("\n")));
    }
    let writes = write_strings(FUZZ_SEED);
    for w in &writes {
        match parse(w) {
            Err(e) if e.class() == ErrorClass::WriteClauseRejected => {}
            other => return Err(format!("{w:?}: expected WriteClauseRejected, got {other:?}")),
        }
    }
    Ok((corpus.len(), writes.len()))
}
