use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusStats, SourceCategory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetRow {
    pub category: SourceCategory,
    pub actual: u64,
    pub reference: u64,
    /// |actual - reference| as a percentage of the reference.
    pub gap_pct: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub tolerance_pct: f64,
    pub rows: Vec<BudgetRow>,
    pub actual_total: u64,
    pub reference_total: u64,
    pub passed: bool,
}

impl BudgetReport {
    pub fn failures(&self) -> impl Iterator<Item = &BudgetRow> {
        self.rows.iter().filter(|r| !r.passed)
    }
}

/// Compares per-category token totals. `tolerance_pct` is in percent, so
/// 5.0 allows a 5% gap. Categories missing on one side count as zero.
pub fn validate_budget(stats: &CorpusStats, reference: &CorpusStats, tolerance_pct: f64) -> BudgetReport {
    let tolerance_pct = tolerance_pct.max(0.0);
    let mut categories: Vec<SourceCategory> = reference.per_category().keys().copied().collect();
    for c in stats.per_category().keys() {
        if !categories.contains(c) {
            categories.push(*c);
        }
    }
    categories.sort();

    let rows: Vec<BudgetRow> = categories
        .into_iter()
        .map(|category| {
            let actual = stats.total_for(category);
            let reference = reference.total_for(category);
            let diff = actual.abs_diff(reference);
            let gap_pct = if reference == 0 {
                if diff == 0 { 0.0 } else { f64::INFINITY }
            } else {
                diff as f64 * 100.0 / reference as f64
            };
            BudgetRow {
                category,
                actual,
                reference,
                gap_pct,
                passed: diff as f64 * 100.0 <= tolerance_pct * reference as f64,
            }
        })
        .collect();

    BudgetReport {
        tolerance_pct,
        passed: rows.iter().all(|r| r.passed),
        rows,
        actual_total: stats.grand_total(),
        reference_total: reference.grand_total(),
    }
}
