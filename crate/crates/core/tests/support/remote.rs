//! Remote translator contract checks against the local stub.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use amkg_core::cypher::{parse, render_ast};
use amkg_core::nl::{Answer, AnswerStatus, Engine, RemoteConfig, TranslatorMode};
use serde_json::Value as Json;

use super::golden::{printable_materials, EXPECTED_REJECTION};
use super::stub::{system_message, user_message, Reply, Stub};

const IN_SCOPE_QUESTION: &str = "Which materials can Cold Spray print?";
/// Differs from the rule translation so a pass-through is observable.
const CANNED_QUERY: &str = "MATCH (p:Process {name: 'Cold Spray'})<-[:PRINTABLE_BY]-(m:Material) RETURN m.name AS material ORDER BY material";

fn remote_engine(stub: &Stub, timeout: Duration) -> Engine {
    let mut config = RemoteConfig::new(stub.base_url.clone());
    config.timeout = timeout;
    Engine::shipped().expect("engine").with_mode(TranslatorMode::Remote).with_remote(Some(config))
}

fn one_request(stub: &Stub) -> Result<Json, String> {
    let requests = stub.requests();
    match requests.as_slice() {
        [r] => Ok(r.clone()),
        other => Err(format!("stub saw {} requests, expected 1", other.len())),
    }
}

/// Positive exemplar answers in a system message.
pub fn count_positive_exemplars(system: &str) -> usize {
    system.lines().filter_map(|l| l.strip_prefix("A: ")).filter(|a| !a.trim().eq_ignore_ascii_case("UNSUPPORTED")).count()
}

pub fn check_outgoing_prompt() -> Result<usize, String> {
    let stub = Stub::spawn(Reply::Content(CANNED_QUERY.into()));
    let engine = remote_engine(&stub, Duration::from_secs(10));
    engine.answer(IN_SCOPE_QUESTION);
    let request = one_request(&stub)?;
    let system = system_message(&request);
    for label in &engine.schema().labels {
        if !system.contains(&label.label) {
            return Err(format!("system message lacks label {}", label.label));
        }
        for p in &label.properties {
            if !system.contains(&p.name) {
                return Err(format!("system message lacks property {}.{}", label.label, p.name));
            }
        }
    }
    for rel in &engine.schema().relationships {
        if !system.contains(&format!("({})-[:{}", rel.from_label, rel.rel_type)) {
            return Err(format!("system message lacks relationship {}", rel.rel_type));
        }
    }
    for unit in ["mm", "cc/hr"] {
        if !system.contains(unit) {
            return Err(format!("system message lacks unit {unit}"));
        }
    }
    let positives = count_positive_exemplars(system);
    if positives < 50 {
        return Err(format!("only {positives} positive exemplars in the system message"));
    }
    if !user_message(&request).contains("Cold Spray") {
        return Err(format!("user message {:?} lacks the question", user_message(&request)));
    }
    Ok(positives)
}

fn first_column(a: &Answer) -> BTreeSet<String> {
    a.rows.iter().map(|r| serde_json::to_value(&r[0]).unwrap().as_str().unwrap_or_default().to_string()).collect()
}

pub fn check_canned_reply() -> Result<(), String> {
    let stub = Stub::spawn(Reply::Content(format!("```cypher\n{CANNED_QUERY}\n```")));
    let engine = remote_engine(&stub, Duration::from_secs(10));
    let a = engine.answer(IN_SCOPE_QUESTION);
    one_request(&stub)?;
    if a.status != AnswerStatus::Answered {
        return Err(format!("status {:?}: {}", a.status, a.text));
    }
    let expected_cypher = render_ast(&parse(CANNED_QUERY).unwrap());
    if a.cypher.as_deref() != Some(expected_cypher.as_str()) {
        return Err(format!("cypher {:?}, expected {expected_cypher:?}", a.cypher));
    }
    let expected: BTreeSet<String> =
        printable_materials(engine.dataset(), "Cold Spray").into_iter().map(String::from).collect();
    if first_column(&a) != expected || expected.is_empty() {
        return Err(format!("rows {:?}, seed scan {expected:?}", first_column(&a)));
    }
    if a.columns != ["material"] {
        return Err(format!("columns {:?}", a.columns));
    }
    for name in &expected {
        if !a.text.contains(name.as_str()) {
            return Err(format!("formatted text lacks {name}"));
        }
    }
    Ok(())
}

pub fn check_unsupported_reply() -> Result<(), String> {
    let stub = Stub::spawn(Reply::Content("unsupported query".into()));
    let engine = remote_engine(&stub, Duration::from_secs(10));
    let a = engine.answer(IN_SCOPE_QUESTION);
    one_request(&stub)?;
    if a.status != AnswerStatus::Unsupported || a.text != EXPECTED_REJECTION || a.cypher.is_some() || !a.rows.is_empty() {
        return Err(format!("status {:?}, text {:?}", a.status, a.text));
    }
    Ok(())
}

fn check_no_content(a: &Answer, engine: &Engine) -> Result<(), String> {
    if a.status != AnswerStatus::Error || a.cypher.is_some() || !a.rows.is_empty() || !a.columns.is_empty() {
        return Err(format!("status {:?}, cypher {:?}, {} rows", a.status, a.cypher, a.rows.len()));
    }
    if let Some(m) = engine.dataset().materials.iter().find(|m| a.text.contains(&m.name)) {
        return Err(format!("error text mentions {}", m.name));
    }
    Ok(())
}

pub fn check_timeout() -> Result<Duration, String> {
    let stub = Stub::spawn(Reply::Stall(Duration::from_secs(3)));
    let engine = remote_engine(&stub, Duration::from_millis(300));
    let start = Instant::now();
    let a = engine.answer(IN_SCOPE_QUESTION);
    let took = start.elapsed();
    check_no_content(&a, &engine)?;
    if !a.text.contains("timed out") {
        return Err(format!("error text {:?} does not report a timeout", a.text));
    }
    if took >= Duration::from_secs(3) {
        return Err(format!("answer took {took:?}, the timeout was not enforced"));
    }
    Ok(took)
}

pub fn check_http_failure() -> Result<(), String> {
    let stub = Stub::spawn(Reply::Status(500));
    let engine = remote_engine(&stub, Duration::from_secs(10));
    check_no_content(&engine.answer(IN_SCOPE_QUESTION), &engine)
}

pub fn check_remote_contract() -> Result<String, String> {
    let positives = check_outgoing_prompt().map_err(|e| format!("(a) {e}"))?;
    check_canned_reply().map_err(|e| format!("(b) {e}"))?;
    check_unsupported_reply().map_err(|e| format!("(c) {e}"))?;
    let took = check_timeout().map_err(|e| format!("(d) {e}"))?;
    Ok(format!("{positives} exemplars sent, timeout surfaced after {took:?}"))
}
