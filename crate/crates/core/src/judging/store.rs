use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::JudgingError;
use crate::evalbench::ModelAnswer;
use crate::jsonl;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Correct,
    Incorrect,
}

/// One annotator's verdict on one answer. `run` names the evaluation run
/// the answer came from when several runs are judged side by side; it is
/// omitted for single-run logs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgmentRecord {
    pub item_id: String,
    pub annotator_id: String,
    pub verdict: Verdict,
    pub timestamp: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<String>,
}

impl JudgmentRecord {
    pub fn new(item_id: impl Into<String>, annotator_id: impl Into<String>, verdict: Verdict) -> Self {
        Self {
            item_id: item_id.into(),
            annotator_id: annotator_id.into(),
            verdict,
            timestamp: Utc::now(),
            run: None,
        }
    }

    pub fn in_run(mut self, run: impl Into<String>) -> Self {
        self.run = Some(run.into());
        self
    }

    pub fn item_key(&self) -> ItemKey {
        ItemKey {
            run: self.run.clone(),
            item_id: self.item_id.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ItemKey {
    pub run: Option<String>,
    pub item_id: String,
}

impl ItemKey {
    pub fn new(run: Option<&str>, item_id: &str) -> Self {
        Self {
            run: run.map(str::to_string),
            item_id: item_id.to_string(),
        }
    }
}

impl fmt::Display for ItemKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.run {
            Some(r) => write!(f, "{r}/{}", self.item_id),
            None => f.write_str(&self.item_id),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Supersession {
    pub item: ItemKey,
    pub annotator_id: String,
    pub previous: Verdict,
    pub current: Verdict,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordOutcome {
    Inserted,
    Superseded(Supersession),
}

/// Verdict set keyed by (item, annotator), optionally mirrored to an
/// append-only JSONL log. Re-judging replaces the earlier verdict in the
/// set while the log keeps both lines.
#[derive(Debug, Default)]
pub struct JudgmentStore {
    known: BTreeSet<ItemKey>,
    records: BTreeMap<(ItemKey, String), JudgmentRecord>,
    supersessions: Vec<Supersession>,
    log: Option<PathBuf>,
}

impl JudgmentStore {
    pub fn new(known: impl IntoIterator<Item = ItemKey>) -> Self {
        Self {
            known: known.into_iter().collect(),
            ..Default::default()
        }
    }

    /// Opens (or creates) a log file and replays it. Later lines win.
    pub fn open(log: &Path, known: impl IntoIterator<Item = ItemKey>) -> Result<Self, JudgingError> {
        let mut store = Self::new(known);
        if log.exists() {
            for record in jsonl::read_jsonl::<JudgmentRecord>(log)? {
                store.apply(record)?;
            }
        }
        store.log = Some(log.to_path_buf());
        Ok(store)
    }

    pub fn is_known(&self, key: &ItemKey) -> bool {
        self.known.contains(key)
    }

    pub fn add_known(&mut self, keys: impl IntoIterator<Item = ItemKey>) {
        self.known.extend(keys);
    }

    fn apply(&mut self, record: JudgmentRecord) -> Result<RecordOutcome, JudgingError> {
        let key = record.item_key();
        if !self.known.contains(&key) {
            return Err(JudgingError::UnknownItem(key));
        }
        let slot = (key.clone(), record.annotator_id.clone());
        let outcome = match self.records.get(&slot) {
            Some(prev) => {
                let s = Supersession {
                    item: key,
                    annotator_id: record.annotator_id.clone(),
                    previous: prev.verdict,
                    current: record.verdict,
                    timestamp: record.timestamp,
                };
                self.supersessions.push(s.clone());
                RecordOutcome::Superseded(s)
            }
            None => RecordOutcome::Inserted,
        };
        self.records.insert(slot, record);
        Ok(outcome)
    }

    /// Stores a verdict, appending it to the log first when one is attached.
    pub fn record(&mut self, record: JudgmentRecord) -> Result<RecordOutcome, JudgingError> {
        let key = record.item_key();
        if !self.known.contains(&key) {
            return Err(JudgingError::UnknownItem(key));
        }
        if let Some(log) = &self.log {
            jsonl::append_jsonl(log, &record)?;
        }
        let outcome = self.apply(record)?;
        if let RecordOutcome::Superseded(s) = &outcome {
            tracing::info!(item = %s.item, annotator = %s.annotator_id, previous = ?s.previous, current = ?s.current, "verdict superseded");
        }
        Ok(outcome)
    }

    /// Current records in (run, item, annotator) order.
    pub fn records(&self) -> Vec<JudgmentRecord> {
        self.records.values().cloned().collect()
    }

    pub fn records_for_run(&self, run: Option<&str>) -> Vec<JudgmentRecord> {
        self.records.values().filter(|r| r.run.as_deref() == run).cloned().collect()
    }

    pub fn supersessions(&self) -> &[Supersession] {
        &self.supersessions
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Answers `annotator_id` has not judged yet, ordered by item id.
/// `records` should already be restricted to the run the answers belong to.
pub fn judgment_queue<'a>(
    answers: &'a [ModelAnswer],
    records: &[JudgmentRecord],
    annotator_id: &str,
) -> Vec<&'a ModelAnswer> {
    let done: BTreeSet<&str> = records
        .iter()
        .filter(|r| r.annotator_id == annotator_id)
        .map(|r| r.item_id.as_str())
        .collect();
    let mut pending: Vec<&ModelAnswer> = answers.iter().filter(|a| !done.contains(a.item_id.as_str())).collect();
    pending.sort_by(|a, b| a.item_id.cmp(&b.item_id));
    pending
}

/// Reads a judgment file. When a file holds several lines for the same
/// (item, annotator), the last one wins.
pub fn import_judgments(path: &Path) -> Result<Vec<JudgmentRecord>, JudgingError> {
    let mut latest: BTreeMap<(ItemKey, String), JudgmentRecord> = BTreeMap::new();
    for r in jsonl::read_jsonl::<JudgmentRecord>(path)? {
        latest.insert((r.item_key(), r.annotator_id.clone()), r);
    }
    Ok(latest.into_values().collect())
}

pub fn export_judgments(records: &[JudgmentRecord], path: &Path) -> Result<(), JudgingError> {
    jsonl::write_jsonl(path, records)?;
    Ok(())
}
