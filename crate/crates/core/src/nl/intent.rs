//! Intent classification by cue and entity scoring.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::lexicon::CueKind;
use super::normalize::NormalizedQuery;
use crate::domain::labels;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IntentCategory {
    BasicRetrieval,
    PrintabilityAnalysis,
    DfamGuidance,
    FeedstockEngineering,
    PostProcessingEstimation,
    CrossMaterialCompatibility,
    CapabilityFiltering,
    AnalyticalQuery,
    Unsupported,
}

impl IntentCategory {
    /// The eight answerable categories, most specific first. Ties in
    /// [`classify_intent`] resolve to the earlier entry.
    pub const PRECEDENCE: [IntentCategory; 8] = [
        IntentCategory::AnalyticalQuery,
        IntentCategory::CapabilityFiltering,
        IntentCategory::CrossMaterialCompatibility,
        IntentCategory::PostProcessingEstimation,
        IntentCategory::DfamGuidance,
        IntentCategory::FeedstockEngineering,
        IntentCategory::PrintabilityAnalysis,
        IntentCategory::BasicRetrieval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IntentCategory::BasicRetrieval => "BasicRetrieval",
            IntentCategory::PrintabilityAnalysis => "PrintabilityAnalysis",
            IntentCategory::DfamGuidance => "DfamGuidance",
            IntentCategory::FeedstockEngineering => "FeedstockEngineering",
            IntentCategory::PostProcessingEstimation => "PostProcessingEstimation",
            IntentCategory::CrossMaterialCompatibility => "CrossMaterialCompatibility",
            IntentCategory::CapabilityFiltering => "CapabilityFiltering",
            IntentCategory::AnalyticalQuery => "AnalyticalQuery",
            IntentCategory::Unsupported => "Unsupported",
        }
    }

    pub fn from_name(name: &str) -> Option<IntentCategory> {
        IntentCategory::PRECEDENCE
            .into_iter()
            .chain([IntentCategory::Unsupported])
            .find(|c| c.name() == name)
    }
}

impl fmt::Display for IntentCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Material-side anchors: named materials and families.
pub(crate) fn anchor_count(q: &NormalizedQuery) -> usize {
    q.entities_with_label(labels::MATERIAL).len() + q.entities_with_label(labels::FAMILY).len()
}

/// Per-category scores in [`IntentCategory::PRECEDENCE`] order.
pub fn intent_scores(q: &NormalizedQuery) -> [(IntentCategory, u32); 8] {
    use IntentCategory::*;
    let has = |label: &str| !q.entities_with_label(label).is_empty();
    let materials = has(labels::MATERIAL);
    let families = has(labels::FAMILY);
    let processes = has(labels::PROCESS);
    let feedstocks = has(labels::FEEDSTOCK);
    let posts = has(labels::POST);
    let states = q.entities_with_label(labels::STATE).len();
    let anchors = anchor_count(q);
    let thresholds = q.thresholds().count() > 0;
    let superlative = q.superlatives.iter().any(|s| s.dimension.is_some());
    let dims = !q.dimensions.is_empty();
    let count = q.has_cue(CueKind::Count);
    let print = q.has_cue(CueKind::Print);

    let analytical = if anchors >= 1 && (thresholds || superlative) {
        5
    } else if count && (q.has_cue(CueKind::Group) || !q.entities.is_empty()) {
        5
    } else {
        0
    };
    let capability = if thresholds || (superlative && !processes) { 4 } else { 0 };
    let cross = if anchors >= 2 && (print || q.mentions_label(labels::PROCESS)) { 4 } else { 0 };
    let post = if posts
        || states >= 2
        || ((q.has_cue(CueKind::Post) || q.mentions_label(labels::POST)) && (processes || materials || families))
    {
        4
    } else {
        0
    };
    let dfam = if processes && dims && !thresholds {
        3
    } else if dims {
        1
    } else {
        0
    };
    let feedstock = if feedstocks || (q.has_cue(CueKind::Feedstock) && (processes || materials || families)) { 3 } else { 0 };
    let printability = if print && (materials || families || processes) {
        2
    } else if print {
        1
    } else {
        0
    };
    let basic = if q.has_cue(CueKind::List) || !q.label_mentions.is_empty() || !q.entities.is_empty() || count {
        1
    } else {
        0
    };
    [
        (AnalyticalQuery, analytical),
        (CapabilityFiltering, capability),
        (CrossMaterialCompatibility, cross),
        (PostProcessingEstimation, post),
        (DfamGuidance, dfam),
        (FeedstockEngineering, feedstock),
        (PrintabilityAnalysis, printability),
        (BasicRetrieval, basic),
    ]
}

/// Highest score wins, ties broken by precedence. Out-of-scope questions
/// and questions that score nowhere are [`IntentCategory::Unsupported`].
pub fn classify_intent(q: &NormalizedQuery) -> IntentCategory {
    if q.out_of_scope {
        return IntentCategory::Unsupported;
    }
    let scores = intent_scores(q);
    let best = scores.iter().map(|(_, s)| *s).max().unwrap_or(0);
    if best == 0 {
        return IntentCategory::Unsupported;
    }
    scores.iter().find(|(_, s)| *s == best).map(|(c, _)| *c).unwrap_or(IntentCategory::Unsupported)
}
