//! Deterministic rule translator: fills a per-category Cypher template from
//! the normalized question.

use super::intent::IntentCategory;
use super::lexicon::{CueKind, Dimension};
use super::normalize::NormalizedQuery;
use crate::cypher::ast::{CompareOp, Literal};
use crate::domain::{labels, SchemaDescriptor};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Translation {
    Cypher(String),
    Unsupported,
}

impl Translation {
    pub fn cypher(&self) -> Option<&str> {
        match self {
            Translation::Cypher(c) => Some(c),
            Translation::Unsupported => None,
        }
    }
}

fn lit(s: &str) -> String {
    Literal::Text(s.to_string()).to_string()
}

fn num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 9e15 {
        Literal::Integer(v as i64).to_string()
    } else {
        Literal::Float(v).to_string()
    }
}

fn list(names: &[&str]) -> String {
    format!("[{}]", names.iter().map(|n| lit(n)).collect::<Vec<_>>().join(", "))
}

fn var_for(label: &str) -> &'static str {
    match label {
        labels::MATERIAL => "m",
        labels::FAMILY => "f",
        labels::PROCESS => "p",
        labels::FEEDSTOCK => "fs",
        labels::FUSION => "ft",
        labels::POST => "pp",
        _ => "s",
    }
}

fn count_alias(label: &str) -> &'static str {
    match label {
        labels::MATERIAL => "material_count",
        labels::FAMILY => "family_count",
        labels::PROCESS => "process_count",
        labels::FEEDSTOCK => "feedstock_count",
        labels::FUSION => "fusion_technique_count",
        labels::POST => "post_process_count",
        _ => "state_count",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Anchor<'a> {
    Material(&'a str),
    Family(&'a str),
}

/// Query centred on the process variable `p`.
#[derive(Default)]
struct ProcessQuery<'a> {
    anchors: Vec<Anchor<'a>>,
    process: Option<&'a str>,
    feedstock: Option<&'a str>,
    fusion: Option<&'a str>,
    steps: Vec<&'a str>,
    /// Bind `pp` to every required post-process.
    post_var: bool,
    /// Bind `fs` to every feedstock.
    feed_var: bool,
    predicates: Vec<String>,
    order: Vec<(String, bool)>,
    limit: Option<u64>,
    projection: Vec<String>,
    distinct: bool,
}

impl ProcessQuery<'_> {
    fn render(&self) -> String {
        let p_decl = match self.process {
            Some(n) => format!("(p:Process {{name: {}}})", lit(n)),
            None => "(p:Process)".to_string(),
        };
        let mut declared = false;
        let mut p = || {
            if declared {
                "(p)".to_string()
            } else {
                declared = true;
                p_decl.clone()
            }
        };
        let mut patterns: Vec<String> = Vec::new();
        if let [single] = self.anchors.as_slice() {
            match single {
                Anchor::Material(n) => patterns.push(format!("(m:Material {{name: {}}})-[:PRINTABLE_BY]->{}", lit(n), p())),
                Anchor::Family(n) => {
                    patterns.push(format!("(m:Material)-[:BELONGS_TO]->(f:MaterialFamily {{name: {}}})", lit(n)));
                    patterns.push(format!("(m)-[:PRINTABLE_BY]->{}", p()));
                }
            }
        } else {
            for (i, a) in self.anchors.iter().enumerate() {
                let i = i + 1;
                match a {
                    Anchor::Material(n) => {
                        patterns.push(format!("(m{i}:Material {{name: {}}})-[:PRINTABLE_BY]->{}", lit(n), p()))
                    }
                    Anchor::Family(n) => patterns.push(format!(
                        "(f{i}:MaterialFamily {{name: {}}})<-[:BELONGS_TO]-(m{i}:Material)-[:PRINTABLE_BY]->{}",
                        lit(n),
                        p()
                    )),
                }
            }
        }
        if let Some(n) = self.feedstock {
            patterns.push(format!("{}-[:USES_FEEDSTOCK]->(fs:Feedstock {{name: {}}})", p(), lit(n)));
        } else if self.feed_var {
            patterns.push(format!("{}-[:USES_FEEDSTOCK]->(fs:Feedstock)", p()));
        }
        if let Some(n) = self.fusion {
            patterns.push(format!("{}-[:USES_FUSION]->(ft:FusionTechnique {{name: {}}})", p(), lit(n)));
        }
        if self.post_var {
            patterns.push(format!("{}-[:REQUIRES_POST]->(pp:PostProcess)", p()));
        }
        let mut steps = self.steps.iter();
        if patterns.is_empty() {
            match steps.next() {
                Some(s) => patterns.push(format!("{}-[:REQUIRES_POST]->(:PostProcess {{name: {}}})", p(), lit(s))),
                None => patterns.push(p()),
            }
        }
        let mut out = format!("MATCH {}", patterns.join(", "));
        for s in steps {
            out.push_str(&format!(" MATCH (p)-[:REQUIRES_POST]->(:PostProcess {{name: {}}})", lit(s)));
        }
        finish(&mut out, &self.predicates, self.distinct, &self.projection, &self.order, self.limit);
        out
    }
}

fn finish(out: &mut String, predicates: &[String], distinct: bool, projection: &[String], order: &[(String, bool)], limit: Option<u64>) {
    if !predicates.is_empty() {
        out.push_str(" WHERE ");
        out.push_str(&predicates.join(" AND "));
    }
    out.push_str(" RETURN ");
    if distinct {
        out.push_str("DISTINCT ");
    }
    out.push_str(&projection.join(", "));
    if !order.is_empty() {
        let items: Vec<String> =
            order.iter().map(|(e, asc)| if *asc { e.clone() } else { format!("{e} DESC") }).collect();
        out.push_str(" ORDER BY ");
        out.push_str(&items.join(", "));
    }
    if let Some(n) = limit {
        out.push_str(&format!(" LIMIT {n}"));
    }
}

struct Slots<'a> {
    q: &'a NormalizedQuery,
    materials: Vec<&'a str>,
    families: Vec<&'a str>,
    processes: Vec<&'a str>,
    feedstocks: Vec<&'a str>,
    fusions: Vec<&'a str>,
    posts: Vec<&'a str>,
    states: Vec<&'a str>,
    anchors: Vec<Anchor<'a>>,
}

impl<'a> Slots<'a> {
    fn new(q: &'a NormalizedQuery, schema: &SchemaDescriptor) -> Self {
        let known = |label: &str| -> Vec<&'a str> {
            q.entities_with_label(label).into_iter().filter(|n| schema.entities(label).iter().any(|e| e == n)).collect()
        };
        let mut anchors = Vec::new();
        for e in &q.entities {
            let a = match e.label.as_str() {
                labels::MATERIAL => Anchor::Material(e.name.as_str()),
                labels::FAMILY => Anchor::Family(e.name.as_str()),
                _ => continue,
            };
            if !anchors.contains(&a) && schema.entities(&e.label).iter().any(|n| *n == e.name) {
                anchors.push(a);
            }
        }
        Slots {
            q,
            materials: known(labels::MATERIAL),
            families: known(labels::FAMILY),
            processes: known(labels::PROCESS),
            feedstocks: known(labels::FEEDSTOCK),
            fusions: known(labels::FUSION),
            posts: known(labels::POST),
            states: known(labels::STATE),
            anchors,
        }
    }

    fn has_family_anchor(&self) -> bool {
        self.anchors.len() > 1 || self.anchors.iter().any(|a| matches!(a, Anchor::Family(_)))
    }

    fn base(&self) -> ProcessQuery<'a> {
        ProcessQuery {
            anchors: self.anchors.clone(),
            process: self.processes.first().copied(),
            feedstock: self.feedstocks.first().copied(),
            fusion: self.fusions.first().copied(),
            steps: self.posts.clone(),
            distinct: self.has_family_anchor(),
            ..ProcessQuery::default()
        }
    }

    /// WHERE predicates and the properties they mention.
    fn thresholds(&self) -> (Vec<String>, Vec<&'static str>) {
        let mut preds = Vec::new();
        let mut props: Vec<&'static str> = Vec::new();
        for n in self.q.thresholds() {
            let dim = n.dimension.unwrap_or(match n.unit {
                Some(super::lexicon::UnitKind::Rate) => Dimension::Rate,
                _ => Dimension::BuildVolume,
            });
            let op = n.hint.unwrap_or(CompareOp::Ge);
            for prop in dim.properties() {
                preds.push(format!("p.{prop} {} {}", op.symbol(), num(n.value)));
                if !props.contains(prop) {
                    props.push(prop);
                }
            }
        }
        (preds, props)
    }

    /// ORDER BY items for the first superlative with a known dimension.
    fn superlative(&self) -> Option<(Vec<(String, bool)>, Vec<&'static str>)> {
        let s = self.q.superlatives.iter().find(|s| s.dimension.is_some())?;
        let props = s.dimension?.properties();
        Some((props.iter().map(|p| (format!("p.{p}"), s.ascending)).collect(), props.to_vec()))
    }
}

fn projection(first: &str, props: &[&str]) -> Vec<String> {
    let mut out = vec![first.to_string()];
    out.extend(props.iter().map(|p| format!("p.{p}")));
    out
}

fn merge_props(mut a: Vec<&'static str>, b: &[&'static str]) -> Vec<&'static str> {
    for p in b {
        if !a.contains(p) {
            a.push(p);
        }
    }
    a
}

/// Builds a query for a classified question, or [`Translation::Unsupported`]
/// when the category is unsupported or a required slot is empty.
pub fn translate_rule(q: &NormalizedQuery, intent: IntentCategory, schema: &SchemaDescriptor) -> Translation {
    let s = Slots::new(q, schema);
    let text = match intent {
        IntentCategory::Unsupported => None,
        IntentCategory::BasicRetrieval => basic(&s),
        IntentCategory::PrintabilityAnalysis => printability(&s),
        IntentCategory::DfamGuidance => dfam(&s),
        IntentCategory::FeedstockEngineering => feedstock(&s),
        IntentCategory::PostProcessingEstimation => post_processing(&s),
        IntentCategory::CrossMaterialCompatibility => cross(&s),
        IntentCategory::CapabilityFiltering => capability(&s),
        IntentCategory::AnalyticalQuery => analytical(&s),
    };
    match text {
        Some(t) => Translation::Cypher(t),
        None => Translation::Unsupported,
    }
}

fn basic(s: &Slots) -> Option<String> {
    let q = s.q;
    let target = q.target_label();
    if let Some(span) = q.cue_span(CueKind::Count) {
        let label = q.label_after(span.start).or(target).unwrap_or(labels::MATERIAL);
        let v = var_for(label);
        return Some(format!("MATCH ({v}:{label}) RETURN count({v}) AS {}", count_alias(label)));
    }
    let only_families = s.materials.is_empty() && s.processes.is_empty();
    if !s.families.is_empty() && only_families && matches!(target, None | Some(labels::MATERIAL)) {
        return Some(match s.families.as_slice() {
            [one] => format!("MATCH (m:Material)-[:BELONGS_TO]->(f:MaterialFamily {{name: {}}}) RETURN m.name", lit(one)),
            many => format!(
                "MATCH (m:Material)-[:BELONGS_TO]->(f:MaterialFamily) WHERE f.name IN {} RETURN m.name, f.name",
                list(many)
            ),
        });
    }
    if let Some(m) = s.materials.first() {
        let m = lit(m);
        return Some(if q.has_cue(CueKind::Synonym) {
            format!("MATCH (m:Material {{name: {m}}}) RETURN m.name, m.synonyms")
        } else if target == Some(labels::FAMILY) {
            format!("MATCH (m:Material {{name: {m}}})-[:BELONGS_TO]->(f:MaterialFamily) RETURN f.name")
        } else {
            format!("MATCH (m:Material {{name: {m}}})-[:BELONGS_TO]->(f:MaterialFamily) RETURN m.name, f.name, m.synonyms")
        });
    }
    if let Some(p) = s.processes.first() {
        let p = lit(p);
        return Some(if q.has_cue(CueKind::Abbreviation) {
            format!("MATCH (p:Process {{name: {p}}}) RETURN p.name, p.abbreviation")
        } else if target == Some(labels::FUSION) {
            format!("MATCH (p:Process {{name: {p}}})-[:USES_FUSION]->(ft:FusionTechnique) RETURN ft.name")
        } else {
            format!("MATCH (p:Process {{name: {p}}})-[:USES_FUSION]->(ft:FusionTechnique) RETURN p.name, p.abbreviation, ft.name")
        });
    }
    if let Some(ft) = s.fusions.first() {
        return Some(format!("MATCH (p:Process)-[:USES_FUSION]->(ft:FusionTechnique {{name: {}}}) RETURN p.name", lit(ft)));
    }
    if let Some(fs) = s.feedstocks.first() {
        return Some(format!("MATCH (fs:Feedstock {{name: {}}}) RETURN fs.name, fs.size_note", lit(fs)));
    }
    let label = target?;
    let v = var_for(label);
    Some(format!("MATCH ({v}:{label}) RETURN {v}.name"))
}

fn printability(s: &Slots) -> Option<String> {
    if s.anchors.len() >= 2 {
        return cross(s);
    }
    let target = s.q.target_label();
    if let Some(process) = s.processes.first().filter(|_| target != Some(labels::PROCESS) || !s.anchors.is_empty()) {
        let p = format!("(p:Process {{name: {}}})", lit(process));
        return Some(if target == Some(labels::FAMILY) && s.anchors.is_empty() {
            format!("MATCH (m:Material)-[:PRINTABLE_BY]->{p}, (m)-[:BELONGS_TO]->(f:MaterialFamily) RETURN DISTINCT f.name")
        } else if let Some(m) = s.materials.first() {
            format!("MATCH (m:Material {{name: {}}})-[:PRINTABLE_BY]->{p} RETURN m.name, p.name", lit(m))
        } else if let Some(f) = s.families.first() {
            format!(
                "MATCH (m:Material)-[:BELONGS_TO]->(f:MaterialFamily {{name: {}}}), (m)-[:PRINTABLE_BY]->{p} RETURN m.name",
                lit(f)
            )
        } else {
            format!("MATCH (m:Material)-[:PRINTABLE_BY]->{p} RETURN m.name")
        });
    }
    match s.anchors.first()? {
        Anchor::Family(f) if target == Some(labels::MATERIAL) => Some(format!(
            "MATCH (m:Material)-[:BELONGS_TO]->(f:MaterialFamily {{name: {}}}), (m)-[:PRINTABLE_BY]->(p:Process) RETURN DISTINCT m.name",
            lit(f)
        )),
        _ => {
            let mut pq = s.base();
            pq.process = None;
            pq.feedstock = None;
            pq.fusion = None;
            pq.steps.clear();
            pq.projection = vec!["p.name".into()];
            Some(pq.render())
        }
    }
}

fn cross(s: &Slots) -> Option<String> {
    if s.anchors.len() < 2 {
        return None;
    }
    let mut pq = s.base();
    pq.process = None;
    pq.fusion = None;
    pq.steps.clear();
    pq.projection = vec!["p.name".into()];
    pq.distinct = true;
    Some(pq.render())
}

const DFAM_DEFAULT: [&str; 4] = ["build_x_mm", "build_y_mm", "build_z_mm", "feature_resolution_mm"];
const PROPERTY_ORDER: [&str; 5] =
    ["build_x_mm", "build_y_mm", "build_z_mm", "feature_resolution_mm", "deposition_rate_cc_hr"];

fn dfam(s: &Slots) -> Option<String> {
    if s.processes.is_empty() {
        return None;
    }
    let wanted: Vec<&str> = s.q.dimension_set().iter().flat_map(|d| d.properties().iter().copied()).collect();
    let props: Vec<&str> = if wanted.is_empty() {
        DFAM_DEFAULT.to_vec()
    } else {
        PROPERTY_ORDER.iter().copied().filter(|p| wanted.contains(p)).collect()
    };
    let cols = projection("p.name", &props).join(", ");
    Some(match s.processes.as_slice() {
        [one] => format!("MATCH (p:Process {{name: {}}}) RETURN {cols}", lit(one)),
        many => format!("MATCH (p:Process) WHERE p.name IN {} RETURN {cols}", list(many)),
    })
}

fn feedstock(s: &Slots) -> Option<String> {
    let q = s.q;
    let target = q.target_label();
    if let Some(fs) = s.feedstocks.first() {
        let standalone = s.processes.is_empty() && s.anchors.is_empty();
        if standalone && target != Some(labels::PROCESS) && (q.has_cue(CueKind::Size) || target == Some(labels::FEEDSTOCK)) {
            return Some(format!("MATCH (fs:Feedstock {{name: {}}}) RETURN fs.name, fs.size_note", lit(fs)));
        }
        let mut pq = s.base();
        pq.steps.clear();
        pq.projection = vec!["p.name".into()];
        return Some(pq.render());
    }
    match s.processes.as_slice() {
        [one] => {
            return Some(format!(
                "MATCH (p:Process {{name: {}}})-[:USES_FEEDSTOCK]->(fs:Feedstock) RETURN fs.name, fs.size_note",
                lit(one)
            ))
        }
        [] => {}
        many => {
            return Some(format!(
                "MATCH (p:Process)-[:USES_FEEDSTOCK]->(fs:Feedstock) WHERE p.name IN {} RETURN p.name, fs.name",
                list(many)
            ))
        }
    }
    if s.anchors.is_empty() {
        return None;
    }
    let mut pq = s.base();
    pq.fusion = None;
    pq.steps.clear();
    pq.feed_var = true;
    pq.projection = vec!["fs.name".into()];
    pq.distinct = true;
    Some(pq.render())
}

fn post_processing(s: &Slots) -> Option<String> {
    if let [from, to, ..] = s.states.as_slice() {
        return Some(format!(
            "MATCH (s1:MaterialState {{name: {}}})-[t:TRANSITIONS_TO]->(s2:MaterialState {{name: {}}}) RETURN t.via_step",
            lit(from),
            lit(to)
        ));
    }
    if !s.posts.is_empty() {
        let mut pq = s.base();
        pq.fusion = None;
        pq.projection = vec!["p.name".into()];
        return Some(pq.render());
    }
    match s.processes.as_slice() {
        [one] => {
            return Some(format!("MATCH (p:Process {{name: {}}})-[:REQUIRES_POST]->(pp:PostProcess) RETURN pp.name", lit(one)))
        }
        [] => {}
        many => {
            return Some(format!(
                "MATCH (p:Process)-[:REQUIRES_POST]->(pp:PostProcess) WHERE p.name IN {} RETURN p.name, collect(pp.name) AS post_processing",
                list(many)
            ))
        }
    }
    if s.anchors.is_empty() {
        return None;
    }
    let mut pq = s.base();
    pq.fusion = None;
    pq.feedstock = None;
    pq.post_var = true;
    if s.has_family_anchor() {
        pq.projection = vec!["p.name".into(), "pp.name".into()];
    } else {
        pq.projection = vec!["p.name".into(), "collect(pp.name) AS post_processing".into()];
    }
    Some(pq.render())
}

fn filtered_query<'a>(s: &Slots<'a>) -> Option<ProcessQuery<'a>> {
    let (predicates, props) = s.thresholds();
    let sup = s.superlative();
    if predicates.is_empty() && sup.is_none() {
        return None;
    }
    let mut pq = s.base();
    let mut props = props;
    if let Some((order, sprops)) = sup {
        pq.order = order;
        pq.limit = Some(1);
        props = merge_props(props, &sprops);
    }
    pq.predicates = predicates;
    pq.projection = projection("p.name", &props);
    Some(pq)
}

fn capability(s: &Slots) -> Option<String> {
    let mut pq = filtered_query(s)?;
    // capability questions carry no material anchor by classification;
    // drop any stray one rather than silently joining on it
    pq.anchors.clear();
    pq.distinct = false;
    Some(pq.render())
}

fn analytical(s: &Slots) -> Option<String> {
    let q = s.q;
    let Some(count) = q.cue_span(CueKind::Count) else {
        let mut pq = filtered_query(s)?;
        if matches!(s.anchors.as_slice(), [Anchor::Family(_)]) && q.target_label() == Some(labels::MATERIAL) {
            pq.projection.insert(0, "m.name".into());
        }
        return Some(pq.render());
    };
    let counted = q
        .label_after(count.start)
        .unwrap_or(if s.materials.is_empty() { labels::MATERIAL } else { labels::PROCESS });
    if let Some(group) = q.cue_span(CueKind::Group) {
        let by = q.label_after(group.start)?;
        let family_base = match s.families.as_slice() {
            [f] if s.materials.is_empty() => Some(*f),
            [] => None,
            _ => return None,
        };
        let (base, key, agg) = match (counted, by) {
            (labels::MATERIAL, labels::PROCESS) => (
                match family_base {
                    Some(f) => format!(
                        "MATCH (m:Material)-[:BELONGS_TO]->(f:MaterialFamily {{name: {}}}), (m)-[:PRINTABLE_BY]->(p:Process)",
                        lit(f)
                    ),
                    None => "MATCH (m:Material)-[:PRINTABLE_BY]->(p:Process)".to_string(),
                },
                "p.name",
                "m",
            ),
            _ if family_base.is_some() => return None,
            (labels::PROCESS, labels::MATERIAL) => ("MATCH (m:Material)-[:PRINTABLE_BY]->(p:Process)".into(), "m.name", "p"),
            (labels::MATERIAL, labels::FAMILY) => ("MATCH (m:Material)-[:BELONGS_TO]->(f:MaterialFamily)".into(), "f.name", "m"),
            (labels::POST, labels::PROCESS) => ("MATCH (p:Process)-[:REQUIRES_POST]->(pp:PostProcess)".into(), "p.name", "pp"),
            (labels::PROCESS, labels::POST) => ("MATCH (p:Process)-[:REQUIRES_POST]->(pp:PostProcess)".into(), "pp.name", "p"),
            (labels::PROCESS, labels::FEEDSTOCK) => ("MATCH (p:Process)-[:USES_FEEDSTOCK]->(fs:Feedstock)".into(), "fs.name", "p"),
            _ => return None,
        };
        let alias = count_alias(counted);
        return Some(format!("{base} RETURN {key}, count({agg}) AS {alias} ORDER BY {alias} DESC, {key}"));
    }
    match counted {
        labels::MATERIAL => {
            let p = s.processes.first().map(|p| format!("(p:Process {{name: {}}})", lit(p)));
            Some(match (s.families.first(), p) {
                (Some(f), Some(p)) => format!(
                    "MATCH (m:Material)-[:BELONGS_TO]->(f:MaterialFamily {{name: {}}}), (m)-[:PRINTABLE_BY]->{p} RETURN count(m) AS material_count",
                    lit(f)
                ),
                (Some(f), None) => format!(
                    "MATCH (m:Material)-[:BELONGS_TO]->(f:MaterialFamily {{name: {}}}) RETURN count(m) AS material_count",
                    lit(f)
                ),
                (None, Some(p)) => format!("MATCH (m:Material)-[:PRINTABLE_BY]->{p} RETURN count(m) AS material_count"),
                (None, None) => "MATCH (m:Material) RETURN count(m) AS material_count".to_string(),
            })
        }
        labels::PROCESS => {
            // a family join would count each process once per member alloy
            if s.has_family_anchor() {
                return None;
            }
            let (predicates, _) = s.thresholds();
            let mut pq = s.base();
            pq.predicates = predicates;
            pq.projection = vec!["count(p) AS process_count".into()];
            Some(pq.render())
        }
        other => {
            let v = var_for(other);
            Some(format!("MATCH ({v}:{other}) RETURN count({v}) AS {}", count_alias(other)))
        }
    }
}
