//! Natural-language question answering over the knowledge graph.

mod engine;
mod exemplars;
mod format;
mod guard;
mod intent;
mod lexicon;
mod normalize;
mod prompt;
mod remote;
mod translate;

pub use engine::{Answer, AnswerStatus, Engine, EngineError, TranslatorMode, UnknownMode};
pub use exemplars::{
    Exemplar, ExemplarBank, ExemplarError, MIN_NEGATIVES, MIN_POSITIVES_PER_CATEGORY, SHIPPED_EXEMPLARS, UNSUPPORTED_TOKEN,
};
pub use format::{format_response, NO_RESULTS, REJECTION};
pub use guard::guard;
pub use intent::{classify_intent, intent_scores, IntentCategory};
pub use lexicon::{
    tokenize_text, CueKind, Dimension, EntityRef, Lexicon, LexiconError, Span, UnitKind, SHIPPED_LEXICON,
};
pub use normalize::{
    format_number, normalize, EntityMatch, NormalizeError, NormalizedQuery, NumericConstraint, Superlative,
};
pub use prompt::{
    build_prompt, build_prompt_with_budget, system_section, user_section, PromptDocument, PromptError,
    DEFAULT_PROMPT_BUDGET, MIN_KEPT_PER_CATEGORY,
};
pub use remote::{
    interpret_reply, request_body, strip_fences, translate_remote, RemoteConfig, RemoteError, DEFAULT_MODEL,
    DEFAULT_TIMEOUT, ENV_API_KEY, ENV_BASE_URL, ENV_MODEL,
};
pub use translate::{translate_rule, Translation};
