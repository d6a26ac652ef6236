use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{EvalError, ExamQuestion, ModelAnswer};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCount {
    pub correct: usize,
    pub total: usize,
}

/// Per-group accuracy with the unweighted (macro) mean across groups and
/// the pooled (micro) accuracy over all items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub per_group: BTreeMap<String, f64>,
    pub counts: BTreeMap<String, GroupCount>,
    pub macro_mean: f64,
    pub overall: f64,
}

impl ScoreReport {
    /// Aggregates `(group, correct)` outcomes.
    pub fn from_outcomes<I, K>(outcomes: I) -> Self
    where
        I: IntoIterator<Item = (K, bool)>,
        K: Into<String>,
    {
        let mut counts: BTreeMap<String, GroupCount> = BTreeMap::new();
        for (group, correct) in outcomes {
            let c = counts.entry(group.into()).or_default();
            c.total += 1;
            c.correct += usize::from(correct);
        }
        Self::from_counts(counts)
    }

    pub fn from_counts(counts: BTreeMap<String, GroupCount>) -> Self {
        let per_group: BTreeMap<String, f64> = counts
            .iter()
            .filter(|(_, c)| c.total > 0)
            .map(|(g, c)| (g.clone(), c.correct as f64 / c.total as f64))
            .collect();
        let macro_mean = if per_group.is_empty() {
            0.0
        } else {
            per_group.values().sum::<f64>() / per_group.len() as f64
        };
        let (correct, total) = counts.values().fold((0, 0), |(c, t), g| (c + g.correct, t + g.total));
        Self {
            per_group,
            counts,
            macro_mean,
            overall: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
        }
    }

    pub fn total(&self) -> usize {
        self.counts.values().map(|c| c.total).sum()
    }

    pub fn correct(&self) -> usize {
        self.counts.values().map(|c| c.correct).sum()
    }
}

/// Scores exam answers grouped by domain. Abstentions and missing
/// extractions count as incorrect.
pub fn score(answers: &[ModelAnswer], gold: &[ExamQuestion]) -> Result<ScoreReport, EvalError> {
    score_by(answers, gold, |q| q.domain.code().to_string())
}

/// Like [`score`] with a caller-chosen grouping key.
pub fn score_by(
    answers: &[ModelAnswer],
    gold: &[ExamQuestion],
    group: impl Fn(&ExamQuestion) -> String,
) -> Result<ScoreReport, EvalError> {
    let by_id: HashMap<&str, &ExamQuestion> = gold.iter().map(|q| (q.id.as_str(), q)).collect();
    let missing: Vec<String> = answers
        .iter()
        .filter(|a| !by_id.contains_key(a.item_id.as_str()))
        .map(|a| a.item_id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(EvalError::MissingGold { item_ids: missing });
    }
    let mut seen = HashSet::new();
    if let Some(dup) = answers.iter().find(|a| !seen.insert(a.item_id.as_str())) {
        return Err(EvalError::DuplicateAnswer(dup.item_id.clone()));
    }
    Ok(ScoreReport::from_outcomes(answers.iter().map(|a| {
        let q = by_id[a.item_id.as_str()];
        let correct = a.extracted.and_then(|e| e.choice()) == Some(q.key);
        (group(q), correct)
    })))
}
