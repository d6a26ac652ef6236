use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ScoreReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunCondition {
    OriginalTr,
    SelfTranslatedEn,
    ExternalTranslatedEn,
}

impl RunCondition {
    pub const ALL: [RunCondition; 3] =
        [RunCondition::OriginalTr, RunCondition::SelfTranslatedEn, RunCondition::ExternalTranslatedEn];

    pub fn title(self) -> &'static str {
        match self {
            RunCondition::OriginalTr => "Original TR",
            RunCondition::SelfTranslatedEn => "Self-Translated EN",
            RunCondition::ExternalTranslatedEn => "External-Translated EN",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedRun {
    pub model: String,
    pub condition: RunCondition,
    pub report: ScoreReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model: String,
    pub cells: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub columns: Vec<RunCondition>,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn cell(&self, model: &str, condition: RunCondition) -> Option<f64> {
        let col = self.columns.iter().position(|&c| c == condition)?;
        self.rows.iter().find(|r| r.model == model)?.cells[col]
    }

    /// Markdown table, accuracies to three decimals, "-" for missing cells.
    pub fn render(&self) -> String {
        let mut out = String::from("| Model |");
        for c in &self.columns {
            let _ = write!(out, " {} |", c.title());
        }
        out.push_str("\n|---|");
        out.push_str(&"---|".repeat(self.columns.len()));
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "| {} |", row.model);
            for cell in &row.cells {
                match cell {
                    Some(v) => {
                        let _ = write!(out, " {v:.3} |");
                    }
                    None => out.push_str(" - |"),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Lays out overall accuracy per model (rows) and condition (columns).
/// Only conditions that appear are given a column. Rows keep first-seen
/// order; a repeated (model, condition) pair keeps the later report.
pub fn compare_runs(runs: &[NamedRun]) -> ComparisonTable {
    let columns: Vec<RunCondition> =
        RunCondition::ALL.into_iter().filter(|c| runs.iter().any(|r| r.condition == *c)).collect();
    let mut rows: Vec<ComparisonRow> = Vec::new();
    for run in runs {
        let col = columns.iter().position(|&c| c == run.condition).expect("column exists");
        let idx = match rows.iter().position(|r| r.model == run.model) {
            Some(i) => i,
            None => {
                rows.push(ComparisonRow { model: run.model.clone(), cells: vec![None; columns.len()] });
                rows.len() - 1
            }
        };
        rows[idx].cells[col] = Some(run.report.overall);
    }
    ComparisonTable { columns, rows }
}
