//! Human judgment of open-ended answers: a review queue, an append-only
//! verdict log, majority-vote accuracy and pairwise Cohen's kappa.

mod accuracy;
mod kappa;
mod store;

pub use accuracy::{accuracy_from_judgments, item_correctness, Policy};
pub use kappa::{agreement_stats, cohen_kappa, pairwise_kappa_matrix, AgreementReport, PairAgreement};
pub use store::{
    export_judgments, import_judgments, judgment_queue, ItemKey, JudgmentRecord, JudgmentStore, RecordOutcome,
    Supersession, Verdict,
};

use crate::jsonl::JsonlError;

#[derive(Debug, thiserror::Error)]
pub enum JudgingError {
    #[error("unknown item {0}")]
    UnknownItem(ItemKey),
    #[error("{} item(s) have no verdict: {}", item_ids.len(), item_ids.join(", "))]
    UnjudgedItems { item_ids: Vec<String> },
    #[error("no gazette item for answer {0}")]
    MissingItem(String),
    #[error("kappa is undefined: both annotators used one and the same label throughout")]
    DegenerateAgreement,
    #[error("label vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("label vectors are empty")]
    EmptyLabels,
    #[error("no two annotators share a judged item")]
    NoOverlap,
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
}
