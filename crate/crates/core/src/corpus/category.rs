use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Categories of the continual pre-training corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CptCategory {
    Academic,
    FinancialInstitutions,
    TextbooksStudyMaterials,
    MarketBusinessData,
    LegislationRegulations,
    OtherReportsDocuments,
}

impl CptCategory {
    pub const ALL: [CptCategory; 6] = [
        CptCategory::Academic,
        CptCategory::FinancialInstitutions,
        CptCategory::TextbooksStudyMaterials,
        CptCategory::MarketBusinessData,
        CptCategory::LegislationRegulations,
        CptCategory::OtherReportsDocuments,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            CptCategory::Academic => "academic",
            CptCategory::FinancialInstitutions => "financial_institutions",
            CptCategory::TextbooksStudyMaterials => "textbooks_study_materials",
            CptCategory::MarketBusinessData => "market_business_data",
            CptCategory::LegislationRegulations => "legislation_regulations",
            CptCategory::OtherReportsDocuments => "other_reports_documents",
        }
    }
}

/// Sources the instruction-tuning data is generated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SftSource {
    Academic,
    CentralBank,
    News,
    TradeRegistryGazette,
}

impl SftSource {
    pub const ALL: [SftSource; 4] = [
        SftSource::Academic,
        SftSource::CentralBank,
        SftSource::News,
        SftSource::TradeRegistryGazette,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            SftSource::Academic => "academic",
            SftSource::CentralBank => "central_bank",
            SftSource::News => "news",
            SftSource::TradeRegistryGazette => "trade_registry_gazette",
        }
    }
}

/// The category a document or chunk belongs to.
///
/// The pre-training categories and the instruction-data sources overlap in
/// name ("academic") but are separate vocabularies, so the textual form
/// always carries its namespace: `cpt:academic`, `sft:news`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SourceCategory {
    Cpt(CptCategory),
    Sft(SftSource),
}

impl SourceCategory {
    pub fn all() -> impl Iterator<Item = SourceCategory> {
        CptCategory::ALL
            .into_iter()
            .map(SourceCategory::Cpt)
            .chain(SftSource::ALL.into_iter().map(SourceCategory::Sft))
    }

    pub fn as_sft(self) -> Option<SftSource> {
        match self {
            SourceCategory::Sft(s) => Some(s),
            SourceCategory::Cpt(_) => None,
        }
    }
}

impl From<CptCategory> for SourceCategory {
    fn from(c: CptCategory) -> Self {
        SourceCategory::Cpt(c)
    }
}

impl From<SftSource> for SourceCategory {
    fn from(s: SftSource) -> Self {
        SourceCategory::Sft(s)
    }
}

impl fmt::Display for SourceCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceCategory::Cpt(c) => write!(f, "cpt:{}", c.slug()),
            SourceCategory::Sft(s) => write!(f, "sft:{}", s.slug()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown source category {0:?} (expected e.g. \"cpt:academic\" or \"sft:news\")")]
pub struct UnknownCategory(pub String);

impl FromStr for SourceCategory {
    type Err = UnknownCategory;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let found = match s.split_once(':') {
            Some(("cpt", slug)) => CptCategory::ALL
                .into_iter()
                .find(|c| c.slug() == slug)
                .map(SourceCategory::Cpt),
            Some(("sft", slug)) => SftSource::ALL
                .into_iter()
                .find(|c| c.slug() == slug)
                .map(SourceCategory::Sft),
            _ => None,
        };
        found.ok_or_else(|| UnknownCategory(s.to_string()))
    }
}

impl TryFrom<String> for SourceCategory {
    type Error = UnknownCategory;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<SourceCategory> for String {
    fn from(c: SourceCategory) -> Self {
        c.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_category_round_trips_through_text() {
        for c in SourceCategory::all() {
            assert_eq!(c.to_string().parse::<SourceCategory>().unwrap(), c);
        }
        assert_eq!(SourceCategory::all().count(), 10);
    }

    #[test]
    fn namespaces_keep_academic_apart() {
        let cpt: SourceCategory = "cpt:academic".parse().unwrap();
        let sft: SourceCategory = "sft:academic".parse().unwrap();
        assert_ne!(cpt, sft);
        assert!("academic".parse::<SourceCategory>().is_err());
        assert!("sft:financial_institutions".parse::<SourceCategory>().is_err());
    }
}
