use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{JudgingError, JudgmentRecord, Verdict};
use crate::evalbench::{GazetteItem, ModelAnswer, ScoreReport};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Strict majority of Correct verdicts; ties count as Incorrect.
    #[default]
    Majority,
}

/// Per-item correctness under `policy`, for every item with any verdict.
pub fn item_correctness(records: &[JudgmentRecord], policy: Policy) -> BTreeMap<String, bool> {
    let mut tally: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for r in records {
        let t = tally.entry(r.item_id.clone()).or_default();
        match r.verdict {
            Verdict::Correct => t.0 += 1,
            Verdict::Incorrect => t.1 += 1,
        }
    }
    tally
        .into_iter()
        .map(|(id, (yes, no))| {
            let correct = match policy {
                Policy::Majority => yes > no,
            };
            (id, correct)
        })
        .collect()
}

/// Accuracy per event type over the judged answers. `records` should cover
/// a single run; every answer needs at least one verdict.
pub fn accuracy_from_judgments(
    records: &[JudgmentRecord],
    answers: &[ModelAnswer],
    items: &[GazetteItem],
    policy: Policy,
) -> Result<ScoreReport, JudgingError> {
    let by_id: HashMap<&str, &GazetteItem> = items.iter().map(|g| (g.id.as_str(), g)).collect();
    let correctness = item_correctness(records, policy);
    let unjudged: Vec<String> = answers
        .iter()
        .filter(|a| !correctness.contains_key(&a.item_id))
        .map(|a| a.item_id.clone())
        .collect();
    if !unjudged.is_empty() {
        return Err(JudgingError::UnjudgedItems { item_ids: unjudged });
    }
    let mut outcomes = Vec::with_capacity(answers.len());
    for a in answers {
        let item = by_id.get(a.item_id.as_str()).ok_or_else(|| JudgingError::MissingItem(a.item_id.clone()))?;
        outcomes.push((item.event_type.code(), correctness[&a.item_id]));
    }
    Ok(ScoreReport::from_outcomes(outcomes))
}
