use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CleanChunk, CptCategory, SourceCategory};

/// Token totals per category.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    per_category: BTreeMap<SourceCategory, u64>,
    grand_total: u64,
}

impl CorpusStats {
    pub fn from_totals(totals: impl IntoIterator<Item = (SourceCategory, u64)>) -> Self {
        let mut stats = CorpusStats::default();
        for (category, tokens) in totals {
            stats.add(category, tokens);
        }
        stats
    }

    /// Approximate pre-training token budget per category (2.19B in total).
    pub fn reference_cpt_budget() -> Self {
        Self::from_totals([
            (CptCategory::Academic.into(), 1_100_000_000),
            (CptCategory::FinancialInstitutions.into(), 150_000_000),
            (CptCategory::TextbooksStudyMaterials.into(), 200_000_000),
            (CptCategory::MarketBusinessData.into(), 350_000_000),
            (CptCategory::LegislationRegulations.into(), 50_000_000),
            (CptCategory::OtherReportsDocuments.into(), 340_000_000),
        ])
    }

    fn add(&mut self, category: SourceCategory, tokens: u64) {
        *self.per_category.entry(category).or_default() += tokens;
        self.grand_total += tokens;
    }

    pub fn total_for(&self, category: SourceCategory) -> u64 {
        self.per_category.get(&category).copied().unwrap_or(0)
    }

    pub fn per_category(&self) -> &BTreeMap<SourceCategory, u64> {
        &self.per_category
    }

    pub fn grand_total(&self) -> u64 {
        self.grand_total
    }

    /// Checks `grand_total == Σ per_category`, e.g. after deserializing.
    pub fn is_consistent(&self) -> bool {
        self.per_category.values().sum::<u64>() == self.grand_total
    }
}

pub fn corpus_stats(chunks: &[CleanChunk]) -> CorpusStats {
    CorpusStats::from_totals(chunks.iter().map(|c| (c.category, c.token_estimate as u64)))
}
