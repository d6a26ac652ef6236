//! Training configuration emission for the CPT and SFT stages, plus token
//! budget validation against a reference category vector.

mod budget;
mod config;

pub use budget::{validate_budget, BudgetReport, BudgetRow};
pub use config::{
    emit_config, parse_config, plan_cpt, plan_sft, read_config, write_config, AdapterConfig, DatasetManifest,
    Overrides, Stage, TrainConfig, CPT_LEARNING_RATE, SFT_LEARNING_RATE,
};

#[derive(Debug, thiserror::Error)]
pub enum TrainPlanError {
    #[error("{field} is pinned to {pinned} and cannot be set to {requested}")]
    InvariantOverride {
        field: &'static str,
        pinned: String,
        requested: String,
    },
    #[error("corpus statistics report zero tokens")]
    EmptyCorpus,
    #[error("dataset manifest lists no samples")]
    EmptyDataset,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Parse(#[from] toml::de::Error),
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
}
