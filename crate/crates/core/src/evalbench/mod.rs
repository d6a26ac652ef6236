//! Benchmarks: few-shot multiple-choice exams scored per domain, open-ended
//! gazette QA collected for human judgment, translated-benchmark runs and a
//! language-switch detector.

mod compare;
mod extract;
mod fewshot;
mod langswitch;
mod load;
mod run;
mod score;
mod translate;
mod types;

pub use compare::{compare_runs, ComparisonRow, ComparisonTable, NamedRun, RunCondition};
pub use extract::extract_choice;
pub use fewshot::{build_fewshot_prompt, FewShotPrompt, DEFAULT_SHOTS};
pub use langswitch::{detect_language_switch, is_cjk, EvidenceSpan, LanguageSwitch, SwitchKind};
pub use load::{load_exams, load_gazette};
pub use run::{gazette_prompt, query_model, run_exams, run_gazette, EvalOptions};
pub use score::{score, score_by, GroupCount, ScoreReport};
pub use translate::{
    apply_translation, translate_items, translation_request, Direction, TranslationExclusion, TranslationOutcome,
};
pub use types::{Choice, EventType, ExamDomain, ExamQuestion, Extraction, GazetteItem, Language, ModelAnswer};

use crate::client::ClientError;
use crate::jsonl::JsonlError;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
    #[error("question {item_id} needs {needed} exemplars but only {available} are available")]
    InsufficientExemplars {
        item_id: String,
        needed: usize,
        available: usize,
    },
    #[error(transparent)]
    Transport(#[from] ClientError),
    #[error("no gold item for answer(s): {}", item_ids.join(", "))]
    MissingGold { item_ids: Vec<String> },
    #[error("more than one answer for item {0}")]
    DuplicateAnswer(String),
}
