//! Hand-written golden questions with expected Cypher and a record-scan oracle.
//!
//! The oracle reads the seed records directly and never touches the graph or
//! the query engine.

use std::collections::BTreeSet;

use amkg_core::cypher::{execute, parse, render_ast};
use amkg_core::domain::{DomainDataset, Family, ProcessSpec};
use amkg_core::nl::{classify_intent, normalize, translate_rule, AnswerStatus, Engine, IntentCategory, Translation};
use serde_json::{json, Value as Json};

type Rows = Vec<Vec<Json>>;

pub struct GoldenCase {
    pub category: IntentCategory,
    pub question: &'static str,
    pub cypher: &'static str,
    /// Row order matters only when the query sorts.
    pub ordered: bool,
    pub oracle: fn(&DomainDataset) -> Rows,
}

pub const EBW_DED_QUESTION: &str = "Which alloys can be printed by Electron Beam Wire DED?";
pub const NICKEL_POST_QUESTION: &str = "Which processes for nickel alloys need both powder removal and heat treatment?";
pub const MECHANICAL_QUESTION: &str =
    "How do the anisotropic mechanical properties of Ti-6Al-4V vary across build orientations and post-processing treatments?";

pub fn printable_processes<'a>(d: &'a DomainDataset, material: &str) -> Vec<&'a str> {
    d.printable_by.iter().filter(|r| r.material_name == material).map(|r| r.process_name.as_str()).collect()
}

pub fn printable_materials<'a>(d: &'a DomainDataset, process: &str) -> Vec<&'a str> {
    d.printable_by.iter().filter(|r| r.process_name == process).map(|r| r.material_name.as_str()).collect()
}

fn family_members(d: &DomainDataset, family: Family) -> Vec<&str> {
    d.materials.iter().filter(|m| m.family == family).map(|m| m.name.as_str()).collect()
}

/// Processes printing at least one member of the family.
pub fn family_processes(d: &DomainDataset, family: Family) -> BTreeSet<&str> {
    family_members(d, family).into_iter().flat_map(|m| printable_processes(d, m)).collect()
}

fn process<'a>(d: &'a DomainDataset, name: &str) -> &'a ProcessSpec {
    d.process(name).expect("seed process")
}

fn requires(p: &ProcessSpec, step: &str) -> bool {
    p.post_processing_names.iter().any(|s| s == step)
}

fn names<'a>(it: impl IntoIterator<Item = &'a str>) -> Rows {
    it.into_iter().map(|n| vec![json!(n)]).collect()
}

/// Nickel-printing processes needing both powder removal and heat treatment.
pub fn nickel_post_processes(d: &DomainDataset) -> BTreeSet<&str> {
    family_processes(d, Family::Nickel)
        .into_iter()
        .filter(|p| {
            let spec = process(d, p);
            requires(spec, "Powder Removal") && requires(spec, "Heat Treatment")
        })
        .collect()
}

pub const CASES: &[GoldenCase] = &[
    // BasicRetrieval
    GoldenCase {
        category: IntentCategory::BasicRetrieval,
        question: "List all material families",
        cypher: "MATCH (f:MaterialFamily) RETURN f.name",
        ordered: false,
        oracle: |d| names(d.families().into_iter().map(Family::name)),
    },
    GoldenCase {
        category: IntentCategory::BasicRetrieval,
        question: "What feedstock types exist?",
        cypher: "MATCH (fs:Feedstock) RETURN fs.name",
        ordered: false,
        oracle: |d| names(d.feedstocks.iter().map(|f| f.name.name())),
    },
    GoldenCase {
        category: IntentCategory::BasicRetrieval,
        question: "Which materials belong to the refractory family?",
        cypher: "MATCH (m:Material)-[:BELONGS_TO]->(f:MaterialFamily {name: 'Refractory'}) RETURN m.name",
        ordered: false,
        oracle: |d| names(family_members(d, Family::Refractory)),
    },
    GoldenCase {
        category: IntentCategory::BasicRetrieval,
        question: "What material states are there?",
        cypher: "MATCH (s:MaterialState) RETURN s.name",
        ordered: false,
        oracle: |d| names(d.states.iter().map(|s| s.name.as_str())),
    },
    // PrintabilityAnalysis
    GoldenCase {
        category: IntentCategory::PrintabilityAnalysis,
        question: EBW_DED_QUESTION,
        cypher: "MATCH (m:Material)-[:PRINTABLE_BY]->(p:Process {name: 'Electron Beam Wire DED'}) RETURN m.name",
        ordered: false,
        oracle: |d| names(printable_materials(d, "Electron Beam Wire DED")),
    },
    GoldenCase {
        category: IntentCategory::PrintabilityAnalysis,
        question: "What processes can print Haynes 282?",
        cypher: "MATCH (m:Material {name: 'Haynes 282'})-[:PRINTABLE_BY]->(p:Process) RETURN p.name",
        ordered: false,
        oracle: |d| names(printable_processes(d, "Haynes 282")),
    },
    GoldenCase {
        category: IntentCategory::PrintabilityAnalysis,
        question: "Which titanium alloys can be printed by Laser PBF?",
        cypher: "MATCH (m:Material)-[:BELONGS_TO]->(f:MaterialFamily {name: 'Titanium'}), \
                 (m)-[:PRINTABLE_BY]->(p:Process {name: 'Laser PBF'}) RETURN m.name",
        ordered: false,
        oracle: |d| {
            let ti = family_members(d, Family::Titanium);
            names(printable_materials(d, "Laser PBF").into_iter().filter(|m| ti.contains(m)))
        },
    },
    GoldenCase {
        category: IntentCategory::PrintabilityAnalysis,
        question: "Which processes can print GRCop-84?",
        cypher: "MATCH (m:Material {name: 'GRCop-84'})-[:PRINTABLE_BY]->(p:Process) RETURN p.name",
        ordered: false,
        oracle: |d| names(printable_processes(d, "GRCop-84")),
    },
    // DfamGuidance
    GoldenCase {
        category: IntentCategory::DfamGuidance,
        question: "What is the build volume of Laser PBF?",
        cypher: "MATCH (p:Process {name: 'Laser PBF'}) RETURN p.name, p.build_x_mm, p.build_y_mm, p.build_z_mm",
        ordered: false,
        oracle: |d| {
            let p = process(d, "Laser PBF");
            vec![vec![json!(p.name), json!(p.build_x_mm), json!(p.build_y_mm), json!(p.build_z_mm)]]
        },
    },
    GoldenCase {
        category: IntentCategory::DfamGuidance,
        question: "What is the feature resolution of Ultrasonic AM?",
        cypher: "MATCH (p:Process {name: 'Ultrasonic AM'}) RETURN p.name, p.feature_resolution_mm",
        ordered: false,
        oracle: |d| {
            let p = process(d, "Ultrasonic AM");
            vec![vec![json!(p.name), json!(p.feature_resolution_mm)]]
        },
    },
    GoldenCase {
        category: IntentCategory::DfamGuidance,
        question: "What is the maximum build height of Arc Wire DED?",
        cypher: "MATCH (p:Process {name: 'Arc Wire DED'}) RETURN p.name, p.build_z_mm",
        ordered: false,
        oracle: |d| {
            let p = process(d, "Arc Wire DED");
            vec![vec![json!(p.name), json!(p.build_z_mm)]]
        },
    },
    GoldenCase {
        category: IntentCategory::DfamGuidance,
        question: "What is the deposition rate of Cold Spray?",
        cypher: "MATCH (p:Process {name: 'Cold Spray'}) RETURN p.name, p.deposition_rate_cc_hr",
        ordered: false,
        oracle: |d| {
            let p = process(d, "Cold Spray");
            vec![vec![json!(p.name), json!(p.deposition_rate_cc_hr)]]
        },
    },
    // FeedstockEngineering
    GoldenCase {
        category: IntentCategory::FeedstockEngineering,
        question: "What feedstock does Ultrasonic AM use?",
        cypher: "MATCH (p:Process {name: 'Ultrasonic AM'})-[:USES_FEEDSTOCK]->(fs:Feedstock) RETURN fs.name, fs.size_note",
        ordered: false,
        oracle: |d| feedstock_rows(d, "Ultrasonic AM"),
    },
    GoldenCase {
        category: IntentCategory::FeedstockEngineering,
        question: "What feedstock does Additive Friction Stir Deposition use?",
        cypher: "MATCH (p:Process {name: 'Additive Friction Stir Deposition'})-[:USES_FEEDSTOCK]->(fs:Feedstock) \
                 RETURN fs.name, fs.size_note",
        ordered: false,
        oracle: |d| feedstock_rows(d, "Additive Friction Stir Deposition"),
    },
    GoldenCase {
        category: IntentCategory::FeedstockEngineering,
        question: "Which processes use wire feedstock?",
        cypher: "MATCH (p:Process)-[:USES_FEEDSTOCK]->(fs:Feedstock {name: 'Wire'}) RETURN p.name",
        ordered: false,
        oracle: |d| {
            names(d.processes.iter().filter(|p| p.feedstock_names.iter().any(|f| f == "Wire")).map(|p| p.name.as_str()))
        },
    },
    GoldenCase {
        category: IntentCategory::FeedstockEngineering,
        question: "What feedstock is used to print Tungsten?",
        cypher: "MATCH (m:Material {name: 'Tungsten'})-[:PRINTABLE_BY]->(p:Process), \
                 (p)-[:USES_FEEDSTOCK]->(fs:Feedstock) RETURN DISTINCT fs.name",
        ordered: false,
        oracle: |d| {
            let set: BTreeSet<&str> = printable_processes(d, "Tungsten")
                .into_iter()
                .flat_map(|p| process(d, p).feedstock_names.iter().map(String::as_str))
                .collect();
            names(set)
        },
    },
    // PostProcessingEstimation
    GoldenCase {
        category: IntentCategory::PostProcessingEstimation,
        question: NICKEL_POST_QUESTION,
        cypher: "MATCH (m:Material)-[:BELONGS_TO]->(f:MaterialFamily {name: 'Nickel'}), (m)-[:PRINTABLE_BY]->(p:Process) \
                 MATCH (p)-[:REQUIRES_POST]->(:PostProcess {name: 'Powder Removal'}) \
                 MATCH (p)-[:REQUIRES_POST]->(:PostProcess {name: 'Heat Treatment'}) RETURN DISTINCT p.name",
        ordered: false,
        oracle: |d| names(nickel_post_processes(d)),
    },
    GoldenCase {
        category: IntentCategory::PostProcessingEstimation,
        question: "What post-processing does Laser PBF require?",
        cypher: "MATCH (p:Process {name: 'Laser PBF'})-[:REQUIRES_POST]->(pp:PostProcess) RETURN pp.name",
        ordered: false,
        oracle: |d| names(process(d, "Laser PBF").post_processing_names.iter().map(String::as_str)),
    },
    GoldenCase {
        category: IntentCategory::PostProcessingEstimation,
        question: "Which processes require powder removal?",
        cypher: "MATCH (p:Process)-[:REQUIRES_POST]->(:PostProcess {name: 'Powder Removal'}) RETURN p.name",
        ordered: false,
        oracle: |d| names(d.processes.iter().filter(|p| requires(p, "Powder Removal")).map(|p| p.name.as_str())),
    },
    GoldenCase {
        category: IntentCategory::PostProcessingEstimation,
        question: "What step moves a part from Heat-Treated to Machined?",
        cypher: "MATCH (s1:MaterialState {name: 'Heat-Treated'})-[t:TRANSITIONS_TO]->(s2:MaterialState {name: 'Machined'}) \
                 RETURN t.via_step",
        ordered: false,
        oracle: |d| {
            names(
                d.state_transitions
                    .iter()
                    .filter(|t| t.from_state == "Heat-Treated" && t.to_state == "Machined")
                    .map(|t| t.via_step.as_str()),
            )
        },
    },
    // CrossMaterialCompatibility
    GoldenCase {
        category: IntentCategory::CrossMaterialCompatibility,
        question: "Which processes can print both copper and titanium alloys?",
        cypher: "MATCH (f1:MaterialFamily {name: 'Copper'})<-[:BELONGS_TO]-(m1:Material)-[:PRINTABLE_BY]->(p:Process), \
                 (f2:MaterialFamily {name: 'Titanium'})<-[:BELONGS_TO]-(m2:Material)-[:PRINTABLE_BY]->(p) RETURN DISTINCT p.name",
        ordered: false,
        oracle: |d| {
            let ti = family_processes(d, Family::Titanium);
            names(family_processes(d, Family::Copper).into_iter().filter(|p| ti.contains(p)))
        },
    },
    GoldenCase {
        category: IntentCategory::CrossMaterialCompatibility,
        question: "Which processes can print both Inconel 718 and Ti-6Al-4V?",
        cypher: "MATCH (m1:Material {name: 'Inconel 718'})-[:PRINTABLE_BY]->(p:Process), \
                 (m2:Material {name: 'Ti-6Al-4V'})-[:PRINTABLE_BY]->(p) RETURN DISTINCT p.name",
        ordered: false,
        oracle: |d| {
            let ti = printable_processes(d, "Ti-6Al-4V");
            let set: BTreeSet<&str> = printable_processes(d, "Inconel 718").into_iter().filter(|p| ti.contains(p)).collect();
            names(set)
        },
    },
    GoldenCase {
        category: IntentCategory::CrossMaterialCompatibility,
        question: "Which processes handle both aluminum and iron alloys?",
        cypher: "MATCH (f1:MaterialFamily {name: 'Aluminum'})<-[:BELONGS_TO]-(m1:Material)-[:PRINTABLE_BY]->(p:Process), \
                 (f2:MaterialFamily {name: 'Iron'})<-[:BELONGS_TO]-(m2:Material)-[:PRINTABLE_BY]->(p) RETURN DISTINCT p.name",
        ordered: false,
        oracle: |d| {
            let fe = family_processes(d, Family::Iron);
            names(family_processes(d, Family::Aluminum).into_iter().filter(|p| fe.contains(p)))
        },
    },
    // CapabilityFiltering
    GoldenCase {
        category: IntentCategory::CapabilityFiltering,
        question: "Which processes have a build height of at least 1500 mm?",
        cypher: "MATCH (p:Process) WHERE p.build_z_mm >= 1500 RETURN p.name, p.build_z_mm",
        ordered: false,
        oracle: |d| {
            d.processes.iter().filter(|p| p.build_z_mm >= 1500.0).map(|p| vec![json!(p.name), json!(p.build_z_mm)]).collect()
        },
    },
    GoldenCase {
        category: IntentCategory::CapabilityFiltering,
        question: "Which processes have a deposition rate of at most 100 cc/hr?",
        cypher: "MATCH (p:Process) WHERE p.deposition_rate_cc_hr <= 100 RETURN p.name, p.deposition_rate_cc_hr",
        ordered: false,
        oracle: |d| {
            d.processes
                .iter()
                .filter(|p| p.deposition_rate_cc_hr <= 100.0)
                .map(|p| vec![json!(p.name), json!(p.deposition_rate_cc_hr)])
                .collect()
        },
    },
    GoldenCase {
        category: IntentCategory::CapabilityFiltering,
        question: "Which process has the largest build height?",
        cypher: "MATCH (p:Process) RETURN p.name, p.build_z_mm ORDER BY p.build_z_mm DESC LIMIT 1",
        ordered: true,
        oracle: |d| {
            let best = d.processes.iter().max_by(|a, b| a.build_z_mm.total_cmp(&b.build_z_mm)).unwrap();
            vec![vec![json!(best.name), json!(best.build_z_mm)]]
        },
    },
    GoldenCase {
        category: IntentCategory::CapabilityFiltering,
        question: "Which processes offer a feature resolution finer than 1 mm?",
        cypher: "MATCH (p:Process) WHERE p.feature_resolution_mm < 1 RETURN p.name, p.feature_resolution_mm",
        ordered: false,
        oracle: |d| {
            d.processes
                .iter()
                .filter(|p| p.feature_resolution_mm < 1.0)
                .map(|p| vec![json!(p.name), json!(p.feature_resolution_mm)])
                .collect()
        },
    },
    // AnalyticalQuery
    GoldenCase {
        category: IntentCategory::AnalyticalQuery,
        question: "How many materials can each process print?",
        cypher: "MATCH (m:Material)-[:PRINTABLE_BY]->(p:Process) RETURN p.name, count(m) AS material_count \
                 ORDER BY material_count DESC, p.name",
        ordered: true,
        oracle: |d| {
            let mut counts: Vec<(&str, i64)> = d
                .processes
                .iter()
                .map(|p| (p.name.as_str(), printable_materials(d, &p.name).len() as i64))
                .filter(|(_, n)| *n > 0)
                .collect();
            counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
            counts.into_iter().map(|(p, n)| vec![json!(p), json!(n)]).collect()
        },
    },
    GoldenCase {
        category: IntentCategory::AnalyticalQuery,
        question: "How many materials can Cold Spray print?",
        cypher: "MATCH (m:Material)-[:PRINTABLE_BY]->(p:Process {name: 'Cold Spray'}) RETURN count(m) AS material_count",
        ordered: false,
        oracle: |d| vec![vec![json!(printable_materials(d, "Cold Spray").len() as i64)]],
    },
    GoldenCase {
        category: IntentCategory::AnalyticalQuery,
        question: "How many nickel alloys can Laser Powder DED print?",
        cypher: "MATCH (m:Material)-[:BELONGS_TO]->(f:MaterialFamily {name: 'Nickel'}), \
                 (m)-[:PRINTABLE_BY]->(p:Process {name: 'Laser Powder DED'}) RETURN count(m) AS material_count",
        ordered: false,
        oracle: |d| {
            let ni = family_members(d, Family::Nickel);
            let n = printable_materials(d, "Laser Powder DED").into_iter().filter(|m| ni.contains(m)).count();
            vec![vec![json!(n as i64)]]
        },
    },
    GoldenCase {
        category: IntentCategory::AnalyticalQuery,
        question: "Which processes can print aluminum alloys with a deposition rate above 500 cc/hr?",
        cypher: "MATCH (m:Material)-[:BELONGS_TO]->(f:MaterialFamily {name: 'Aluminum'}), (m)-[:PRINTABLE_BY]->(p:Process) \
                 WHERE p.deposition_rate_cc_hr > 500 RETURN DISTINCT p.name, p.deposition_rate_cc_hr",
        ordered: false,
        oracle: |d| {
            family_processes(d, Family::Aluminum)
                .into_iter()
                .map(|p| process(d, p))
                .filter(|p| p.deposition_rate_cc_hr > 500.0)
                .map(|p| vec![json!(p.name), json!(p.deposition_rate_cc_hr)])
                .collect()
        },
    },
];

/// Out-of-scope questions the rule translator must refuse.
pub const UNSUPPORTED_CASES: &[&str] = &[
    MECHANICAL_QUESTION,
    "What is the yield strength of 316L Stainless Steel?",
    "What is the price of Laser PBF machines?",
];

fn feedstock_rows(d: &DomainDataset, name: &str) -> Rows {
    process(d, name)
        .feedstock_names
        .iter()
        .map(|f| {
            let spec = d.feedstocks.iter().find(|s| s.name.name() == f).expect("seed feedstock");
            vec![json!(f), json!(spec.size_note)]
        })
        .collect()
}

fn sorted(mut rows: Rows) -> Rows {
    rows.sort_by_key(|r| serde_json::to_string(r).unwrap());
    rows
}

/// Runs one case through rule translation and execution and compares with the oracle.
pub fn check_case(engine: &Engine, case: &GoldenCase) -> Result<(), String> {
    let q = normalize(case.question, engine.lexicon()).map_err(|e| format!("{}: {e}", case.question))?;
    let intent = classify_intent(&q);
    if intent != case.category {
        return Err(format!("{}: intent {intent:?}, expected {:?}", case.question, case.category));
    }
    let Translation::Cypher(text) = translate_rule(&q, intent, engine.schema()) else {
        return Err(format!("{}: translated to UNSUPPORTED", case.question));
    };
    let golden = render_ast(&parse(case.cypher).map_err(|e| format!("golden for {}: {e}", case.question))?);
    let got = render_ast(&parse(&text).map_err(|e| format!("{}: {e}", case.question))?);
    if got != golden {
        return Err(format!("{}:\n  got    {got}\n  golden {golden}", case.question));
    }
    let validated = amkg_core::nl::guard(&text, engine.schema()).map_err(|e| format!("{}: {e}", case.question))?;
    let table = execute(engine.graph(), validated.query()).map_err(|e| format!("{}: {e}", case.question))?;
    let rows: Rows = table.rows.iter().map(|r| r.iter().map(|v| serde_json::to_value(v).unwrap()).collect()).collect();
    let expected = (case.oracle)(engine.dataset());
    let (rows, expected) = if case.ordered { (rows, expected) } else { (sorted(rows), sorted(expected)) };
    if rows != expected {
        return Err(format!("{}: rows differ\n  got    {rows:?}\n  oracle {expected:?}", case.question));
    }
    if rows.is_empty() {
        return Err(format!("{}: oracle and engine agree on an empty answer; pick a case with rows", case.question));
    }
    Ok(())
}

/// Checks every golden and unsupported case; returns the number checked.
pub fn check_golden_suite(engine: &Engine) -> Result<usize, String> {
    let failures: Vec<String> = CASES.iter().filter_map(|c| check_case(engine, c).err()).collect();
    if !failures.is_empty() {
        return Err(failures.join("\n"));
    }
    for category in IntentCategory::PRECEDENCE {
        let n = CASES.iter().filter(|c| c.category == category).count();
        if n < 3 {
            return Err(format!("only {n} golden cases for {category:?}"));
        }
    }
    for question in UNSUPPORTED_CASES {
        let q = normalize(question, engine.lexicon()).map_err(|e| e.to_string())?;
        let intent = classify_intent(&q);
        if intent != IntentCategory::Unsupported || translate_rule(&q, intent, engine.schema()) != Translation::Unsupported {
            return Err(format!("{question}: expected UNSUPPORTED, intent {intent:?}"));
        }
    }
    Ok(CASES.len() + UNSUPPORTED_CASES.len())
}

/// The rejection sentence, spelled out independently of the formatter.
pub const EXPECTED_REJECTION: &str = "Sorry, the current knowledge graph does not support this type of query.";

fn first_column_set(engine: &Engine, question: &str) -> Result<BTreeSet<String>, String> {
    let a = engine.answer(question);
    if a.status != AnswerStatus::Answered {
        return Err(format!("{question}: status {:?}: {}", a.status, a.text));
    }
    Ok(a.rows.iter().map(|r| serde_json::to_value(&r[0]).unwrap().as_str().unwrap_or_default().to_string()).collect())
}

pub fn check_ebw_ded_printability(engine: &Engine) -> Result<usize, String> {
    let got = first_column_set(engine, EBW_DED_QUESTION)?;
    let expected: BTreeSet<String> =
        printable_materials(engine.dataset(), "Electron Beam Wire DED").into_iter().map(String::from).collect();
    if got != expected || got.is_empty() {
        return Err(format!("got {got:?}, seed scan {expected:?}"));
    }
    Ok(got.len())
}

pub fn check_nickel_post_processing(engine: &Engine) -> Result<usize, String> {
    let got = first_column_set(engine, NICKEL_POST_QUESTION)?;
    let expected: BTreeSet<String> = nickel_post_processes(engine.dataset()).into_iter().map(String::from).collect();
    if got != expected || got.is_empty() {
        return Err(format!("got {got:?}, seed scan {expected:?}"));
    }
    Ok(got.len())
}

pub fn check_mechanical_rejection(engine: &Engine) -> Result<(), String> {
    let a = engine.answer(MECHANICAL_QUESTION);
    if a.status != AnswerStatus::Unsupported || a.text != EXPECTED_REJECTION || a.cypher.is_some() || !a.rows.is_empty() {
        return Err(format!("status {:?}, text {:?}", a.status, a.text));
    }
    Ok(())
}
