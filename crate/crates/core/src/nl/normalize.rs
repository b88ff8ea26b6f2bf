//! Question normalization: tokens, resolved entities, unit-normalized
//! numbers with comparison hints, intent cues, and the out-of-scope flag.

use thiserror::Error;

use super::lexicon::{tokenize_text, CueKind, Dimension, Lexicon, Span, UnitKind};
use crate::cypher::ast::CompareOp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("the question is empty")]
    EmptyQuery,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntityMatch {
    pub span: Span,
    pub surface: String,
    pub name: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericConstraint {
    /// Number token plus any unit tokens.
    pub span: Span,
    pub raw: f64,
    /// In mm for lengths, cc/hr for rates.
    pub value: f64,
    pub unit: Option<UnitKind>,
    pub hint: Option<CompareOp>,
    pub dimension: Option<Dimension>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Superlative {
    pub span: Span,
    pub dimension: Option<Dimension>,
    pub ascending: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedQuery {
    pub original: String,
    pub tokens: Vec<String>,
    pub entities: Vec<EntityMatch>,
    pub numbers: Vec<NumericConstraint>,
    pub superlatives: Vec<Superlative>,
    pub dimensions: Vec<(Span, Dimension)>,
    pub cues: Vec<(Span, CueKind)>,
    pub label_mentions: Vec<(Span, String)>,
    pub out_of_scope: bool,
    pub out_of_scope_terms: Vec<String>,
}

/// Rounds away float noise from unit conversion (0.3 cm -> 3 mm, not 3.0000000000000004).
fn tidy(v: f64) -> f64 {
    let r = (v * 1e9).round() / 1e9;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Integral values without a fraction, others in shortest form.
pub fn format_number(v: f64) -> String {
    if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn parse_plain_number(s: &str) -> Option<f64> {
    let ok = !s.is_empty()
        && s.chars().all(|c| c.is_ascii_digit() || c == '.')
        && s.chars().any(|c| c.is_ascii_digit())
        && s.matches('.').count() <= 1;
    if ok {
        s.parse().ok()
    } else {
        None
    }
}

pub fn normalize(text: &str, lexicon: &Lexicon) -> Result<NormalizedQuery, NormalizeError> {
    let tokens = tokenize_text(text);
    if tokens.is_empty() {
        return Err(NormalizeError::EmptyQuery);
    }
    let n = tokens.len();
    let none = vec![false; n];

    let mut out_of_scope_terms: Vec<String> = Vec::new();
    for t in &tokens {
        for w in &lexicon.out_of_scope_words {
            if t.starts_with(w.as_str()) && !out_of_scope_terms.contains(w) {
                out_of_scope_terms.push(w.clone());
            }
        }
    }
    for (span, _) in lexicon.out_of_scope_phrases.find_all(&tokens, &none) {
        let phrase = tokens[span.start..span.end].join(" ");
        if !out_of_scope_terms.contains(&phrase) {
            out_of_scope_terms.push(phrase);
        }
    }

    let entities: Vec<EntityMatch> = lexicon
        .entities
        .find_all(&tokens, &none)
        .into_iter()
        .map(|(span, e)| EntityMatch {
            span,
            surface: tokens[span.start..span.end].join(" "),
            name: e.name.clone(),
            label: e.label.clone(),
        })
        .collect();
    let mut mask = none.clone();
    for e in &entities {
        mask[e.span.start..e.span.end].iter_mut().for_each(|m| *m = true);
    }

    // numbers with optional unit
    let mut numbers: Vec<NumericConstraint> = Vec::new();
    let mut i = 0;
    while i < n {
        if mask[i] {
            i += 1;
            continue;
        }
        let tok = &tokens[i];
        let mut parsed = None;
        if let Some(v) = parse_plain_number(tok) {
            let unit = lexicon.units.match_at(&tokens, i + 1, &mask);
            let end = unit.map(|(s, _)| s.end).unwrap_or(i + 1);
            parsed = Some((v, unit.map(|(_, u)| *u), end));
        } else {
            let split = tok.find(|c: char| !(c.is_ascii_digit() || c == '.')).unwrap_or(tok.len());
            if split > 0 && split < tok.len() {
                if let (Some(v), Some(u)) =
                    (parse_plain_number(&tok[..split]), lexicon.units.get_tokens(&[tok[split..].to_string()]))
                {
                    parsed = Some((v, Some(*u), i + 1));
                }
            }
        }
        match parsed {
            Some((raw, unit, end)) => {
                numbers.push(NumericConstraint {
                    span: Span { start: i, end },
                    raw,
                    value: tidy(unit.map(|u| raw * u.factor).unwrap_or(raw)),
                    unit: unit.map(|u| u.kind),
                    hint: None,
                    dimension: None,
                });
                i = end;
            }
            None => i += 1,
        }
    }
    for num in &numbers {
        mask[num.span.start..num.span.end].iter_mut().for_each(|m| *m = true);
    }
    let content_mask = mask.clone();

    // comparison hints next to numbers; dimension words and fillers may sit
    // in between ("at least a build height of 50 cm")
    let comparisons = lexicon.comparisons.find_all(&tokens, &mask);
    let mut cmp_mask = mask.clone();
    for (s, _) in &comparisons {
        cmp_mask[s.start..s.end].iter_mut().for_each(|m| *m = true);
    }
    let dimensions: Vec<(Span, Dimension)> =
        lexicon.dimensions.find_all(&tokens, &cmp_mask).into_iter().map(|(s, d)| (s, *d)).collect();
    let in_dimension = |i: usize| dimensions.iter().any(|(s, _)| s.start <= i && i < s.end);
    let filler = |from: usize, to: usize| {
        to - from <= 5
            && (from..to).all(|i| in_dimension(i) || matches!(tokens[i].as_str(), "of" | "a" | "an" | "the" | "is" | "be"))
    };
    let mut used_comparison = vec![false; comparisons.len()];
    for num in &mut numbers {
        let leading = comparisons
            .iter()
            .enumerate()
            .rev()
            .find(|(_, (s, c))| !c.trailing && s.end <= num.span.start && filler(s.end, num.span.start));
        let trailing = comparisons
            .iter()
            .enumerate()
            .find(|(_, (s, c))| c.trailing && s.start >= num.span.end && s.start - num.span.end <= 1);
        if let Some((idx, (_, c))) = leading.or(trailing) {
            num.hint = Some(c.op);
            used_comparison[idx] = true;
        }
    }
    let mut dim_mask = mask.clone();
    for (idx, (span, _)) in comparisons.iter().enumerate() {
        let phrase = &tokens[span.start..span.end];
        // an unused "minimum"/"max" may still be a superlative
        let reusable = !used_comparison[idx] && lexicon.superlatives.get_tokens(phrase).is_some();
        if !reusable {
            dim_mask[span.start..span.end].iter_mut().for_each(|m| *m = true);
        }
    }
    for (s, _) in &dimensions {
        dim_mask[s.start..s.end].iter_mut().for_each(|x| *x = true);
    }

    for num in &mut numbers {
        let before = dimensions
            .iter()
            .filter(|(s, _)| s.end <= num.span.start && num.span.start - s.end <= 6)
            .max_by_key(|(s, _)| s.end);
        let after = dimensions
            .iter()
            .filter(|(s, _)| s.start >= num.span.end && s.start - num.span.end <= 4)
            .min_by_key(|(s, _)| s.start);
        let mut dim = before.or(after).map(|(_, d)| *d);
        match (dim, num.unit) {
            (Some(d), Some(u)) if d.unit_kind() != u => dim = (u == UnitKind::Rate).then_some(Dimension::Rate),
            (None, Some(UnitKind::Rate)) => dim = Some(Dimension::Rate),
            _ => {}
        }
        if num.unit.is_none() {
            num.unit = dim.map(Dimension::unit_kind);
        }
        num.dimension = dim;
    }

    let superlatives = lexicon
        .superlatives
        .find_all(&tokens, &dim_mask)
        .into_iter()
        .map(|(span, high)| {
            let after = dimensions.iter().filter(|(s, _)| s.start >= span.end && s.start - span.end <= 4).min_by_key(|(s, _)| s.start);
            let before = dimensions.iter().filter(|(s, _)| s.end <= span.start && span.start - s.end <= 4).max_by_key(|(s, _)| s.end);
            let dimension = after.or(before).or(dimensions.first()).map(|(_, d)| *d);
            let phrase = &tokens[span.start..span.end];
            let ascending = match dimension {
                Some(Dimension::Resolution) => lexicon.resolution_order.get_tokens(phrase).copied().unwrap_or(!*high),
                _ => !*high,
            };
            Superlative { span, dimension, ascending }
        })
        .collect();

    let mut cues = Vec::new();
    for (kind, map) in &lexicon.cues {
        for (span, _) in map.find_all(&tokens, &content_mask) {
            cues.push((span, *kind));
        }
    }
    cues.sort_by_key(|(s, k)| (s.start, *k));
    let label_mentions =
        lexicon.label_terms.find_all(&tokens, &content_mask).into_iter().map(|(s, l)| (s, l.clone())).collect();

    Ok(NormalizedQuery {
        original: text.to_string(),
        tokens,
        entities,
        numbers,
        superlatives,
        dimensions,
        cues,
        label_mentions,
        out_of_scope: !out_of_scope_terms.is_empty(),
        out_of_scope_terms,
    })
}

impl NormalizedQuery {
    /// The tokens with entities replaced by canonical names and numbers by
    /// their unit-normalized values. Normalizing this text again resolves
    /// the same entities and constraints.
    pub fn rendered(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.tokens.len() {
            if let Some(e) = self.entities.iter().find(|e| e.span.start == i) {
                parts.push(e.name.clone());
                i = e.span.end;
            } else if let Some(num) = self.numbers.iter().find(|x| x.span.start == i) {
                let had_unit = num.span.end > num.span.start + 1 || parse_plain_number(&self.tokens[i]).is_none();
                match num.unit {
                    Some(u) if had_unit => parts.push(format!("{} {}", format_number(num.value), u.symbol())),
                    _ => parts.push(format_number(num.value)),
                }
                i = num.span.end;
            } else {
                parts.push(self.tokens[i].clone());
                i += 1;
            }
        }
        parts.join(" ")
    }

    pub fn has_cue(&self, kind: CueKind) -> bool {
        self.cues.iter().any(|(_, k)| *k == kind)
    }

    pub fn cue_span(&self, kind: CueKind) -> Option<Span> {
        self.cues.iter().find(|(_, k)| *k == kind).map(|(s, _)| *s)
    }

    /// Entities with the given label, in question order, without repeats.
    pub fn entities_with_label(&self, label: &str) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for e in self.entities.iter().filter(|e| e.label == label) {
            if !out.contains(&e.name.as_str()) {
                out.push(&e.name);
            }
        }
        out
    }

    /// First label noun in the question ("Which processes ..." -> Process).
    pub fn target_label(&self) -> Option<&str> {
        self.label_mentions.first().map(|(_, l)| l.as_str())
    }

    /// First label noun starting at or after `token`.
    pub fn label_after(&self, token: usize) -> Option<&str> {
        self.label_mentions.iter().find(|(s, _)| s.start >= token).map(|(_, l)| l.as_str())
    }

    pub fn mentions_label(&self, label: &str) -> bool {
        self.label_mentions.iter().any(|(_, l)| l == label)
    }

    pub fn dimension_set(&self) -> Vec<Dimension> {
        let mut v: Vec<Dimension> = self.dimensions.iter().map(|(_, d)| *d).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Numbers that constrain a process property.
    pub fn thresholds(&self) -> impl Iterator<Item = &NumericConstraint> {
        self.numbers.iter().filter(|n| n.dimension.is_some() || n.unit.is_some())
    }
}
