use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::TrainPlanError;
use crate::corpus::CorpusStats;
use crate::syngen::InstructionSample;

pub const CPT_LEARNING_RATE: f64 = 2e-5;
pub const SFT_LEARNING_RATE: f64 = 2e-6;
const RANK: u32 = 64;
const ALPHA: u32 = 128;
const QUANT_BITS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Stage {
    Cpt,
    Sft,
}

impl Stage {
    pub fn learning_rate(self) -> f64 {
        match self {
            Stage::Cpt => CPT_LEARNING_RATE,
            Stage::Sft => SFT_LEARNING_RATE,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Stage::Cpt => "CPT",
            Stage::Sft => "SFT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdapterConfig {
    pub rank: u32,
    pub alpha: u32,
    pub target_scope: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub stage: Stage,
    pub learning_rate: f64,
    pub optimizer_id: String,
    pub precision_id: String,
    pub quant_bits: u32,
    pub dataset_path: String,
    pub checkpoint_interval_steps: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epochs: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheduler: Option<String>,
    pub adapter: AdapterConfig,
}

impl TrainConfig {
    fn defaults(stage: Stage, dataset_path: String) -> Self {
        Self {
            stage,
            learning_rate: stage.learning_rate(),
            optimizer_id: "paged_adamw_8bit".into(),
            precision_id: "bf16".into(),
            quant_bits: QUANT_BITS,
            dataset_path,
            checkpoint_interval_steps: 1000,
            batch_size: None,
            epochs: None,
            scheduler: None,
            adapter: AdapterConfig {
                rank: RANK,
                alpha: ALPHA,
                target_scope: "all-linear+head+embeddings".into(),
            },
        }
    }

    /// Checks the pinned hyperparameters and basic sanity.
    pub fn validate(&self) -> Result<(), TrainPlanError> {
        pinned("learning_rate", self.stage.learning_rate(), self.learning_rate)?;
        pinned("adapter.rank", RANK, self.adapter.rank)?;
        pinned("adapter.alpha", ALPHA, self.adapter.alpha)?;
        pinned("quant_bits", QUANT_BITS, self.quant_bits)?;
        if self.checkpoint_interval_steps == 0 {
            return Err(TrainPlanError::InvalidConfig("checkpoint_interval_steps must be positive".into()));
        }
        if self.dataset_path.trim().is_empty() {
            return Err(TrainPlanError::InvalidConfig("dataset_path is empty".into()));
        }
        Ok(())
    }
}

fn pinned<T: PartialEq + std::fmt::Display>(field: &'static str, pin: T, got: T) -> Result<(), TrainPlanError> {
    if pin == got {
        Ok(())
    } else {
        Err(TrainPlanError::InvariantOverride {
            field,
            pinned: pin.to_string(),
            requested: got.to_string(),
        })
    }
}

/// Caller-supplied changes to the defaults. Setting a pinned field to
/// anything but its pinned value is an error.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    pub learning_rate: Option<f64>,
    pub optimizer_id: Option<String>,
    pub precision_id: Option<String>,
    pub rank: Option<u32>,
    pub alpha: Option<u32>,
    pub target_scope: Option<String>,
    pub quant_bits: Option<u32>,
    pub dataset_path: Option<String>,
    pub checkpoint_interval_steps: Option<u64>,
    pub batch_size: Option<u32>,
    pub epochs: Option<u32>,
    pub scheduler: Option<String>,
}

impl Overrides {
    fn apply(&self, cfg: &mut TrainConfig) -> Result<(), TrainPlanError> {
        if let Some(v) = self.learning_rate {
            pinned("learning_rate", cfg.learning_rate, v)?;
        }
        if let Some(v) = self.rank {
            pinned("adapter.rank", RANK, v)?;
        }
        if let Some(v) = self.alpha {
            pinned("adapter.alpha", ALPHA, v)?;
        }
        if let Some(v) = self.quant_bits {
            pinned("quant_bits", QUANT_BITS, v)?;
        }
        if let Some(v) = &self.optimizer_id {
            cfg.optimizer_id = v.clone();
        }
        if let Some(v) = &self.precision_id {
            cfg.precision_id = v.clone();
        }
        if let Some(v) = &self.target_scope {
            cfg.adapter.target_scope = v.clone();
        }
        if let Some(v) = &self.dataset_path {
            cfg.dataset_path = v.clone();
        }
        if let Some(v) = self.checkpoint_interval_steps {
            cfg.checkpoint_interval_steps = v;
        }
        cfg.batch_size = self.batch_size.or(cfg.batch_size);
        cfg.epochs = self.epochs.or(cfg.epochs);
        if let Some(v) = &self.scheduler {
            cfg.scheduler = Some(v.clone());
        }
        cfg.validate()
    }
}

/// What the SFT stage needs to know about a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub dataset_path: String,
    pub sample_count: usize,
}

impl DatasetManifest {
    pub fn from_samples(dataset_path: impl Into<String>, samples: &[InstructionSample]) -> Self {
        Self {
            dataset_path: dataset_path.into(),
            sample_count: samples.len(),
        }
    }
}

pub fn plan_cpt(stats: &CorpusStats, overrides: &Overrides) -> Result<TrainConfig, TrainPlanError> {
    if stats.grand_total() == 0 {
        return Err(TrainPlanError::EmptyCorpus);
    }
    let mut cfg = TrainConfig::defaults(Stage::Cpt, "chunks.jsonl".into());
    overrides.apply(&mut cfg)?;
    Ok(cfg)
}

pub fn plan_sft(manifest: &DatasetManifest, overrides: &Overrides) -> Result<TrainConfig, TrainPlanError> {
    if manifest.sample_count == 0 {
        return Err(TrainPlanError::EmptyDataset);
    }
    let mut cfg = TrainConfig::defaults(Stage::Sft, manifest.dataset_path.clone());
    overrides.apply(&mut cfg)?;
    Ok(cfg)
}

fn quoted(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

/// Renders the config as TOML with a fixed key order.
///
/// Floats use the shortest exponent form, so 2e-5 is written as `2e-5`
/// rather than a long decimal.
pub fn emit_config(cfg: &TrainConfig) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "stage = {}", quoted(cfg.stage.name()));
    let _ = writeln!(w, "learning_rate = {:e}", cfg.learning_rate);
    let _ = writeln!(w, "optimizer_id = {}", quoted(&cfg.optimizer_id));
    let _ = writeln!(w, "precision_id = {}", quoted(&cfg.precision_id));
    let _ = writeln!(w, "quant_bits = {}", cfg.quant_bits);
    let _ = writeln!(w, "dataset_path = {}", quoted(&cfg.dataset_path));
    let _ = writeln!(w, "checkpoint_interval_steps = {}", cfg.checkpoint_interval_steps);
    if let Some(v) = cfg.batch_size {
        let _ = writeln!(w, "batch_size = {v}");
    }
    if let Some(v) = cfg.epochs {
        let _ = writeln!(w, "epochs = {v}");
    }
    if let Some(v) = &cfg.scheduler {
        let _ = writeln!(w, "scheduler = {}", quoted(v));
    }
    let _ = writeln!(w, "\n[adapter]");
    let _ = writeln!(w, "rank = {}", cfg.adapter.rank);
    let _ = writeln!(w, "alpha = {}", cfg.adapter.alpha);
    let _ = writeln!(w, "target_scope = {}", quoted(&cfg.adapter.target_scope));
    out
}

/// Parses a config file and rejects any pinned value that differs from
/// the stage's pinned setting.
pub fn parse_config(text: &str) -> Result<TrainConfig, TrainPlanError> {
    let cfg: TrainConfig = toml::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn write_config(cfg: &TrainConfig, path: &Path) -> Result<(), TrainPlanError> {
    let io = |source| TrainPlanError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, emit_config(cfg)).map_err(io)
}

pub fn read_config(path: &Path) -> Result<TrainConfig, TrainPlanError> {
    let text = std::fs::read_to_string(path).map_err(|source| TrainPlanError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cpt_defaults() {
        let cfg = plan_cpt(&CorpusStats::reference_cpt_budget(), &Overrides::default()).unwrap();
        assert_eq!(cfg.learning_rate, 2e-5);
        assert_eq!((cfg.adapter.rank, cfg.adapter.alpha, cfg.quant_bits), (64, 128, 4));
        assert_eq!(cfg.optimizer_id, "paged_adamw_8bit");
        assert_eq!(cfg.precision_id, "bf16");
    }

    #[test]
    fn pinned_learning_rate_cannot_move() {
        let o = Overrides { learning_rate: Some(1e-4), ..Default::default() };
        let err = plan_cpt(&CorpusStats::reference_cpt_budget(), &o).unwrap_err();
        assert!(matches!(err, TrainPlanError::InvariantOverride { field: "learning_rate", .. }));
        let same = Overrides { learning_rate: Some(2e-5), ..Default::default() };
        assert!(plan_cpt(&CorpusStats::reference_cpt_budget(), &same).is_ok());
    }

    #[test]
    fn unpinned_checkpoint_interval_moves() {
        let o = Overrides { checkpoint_interval_steps: Some(500), ..Default::default() };
        let cfg = plan_cpt(&CorpusStats::reference_cpt_budget(), &o).unwrap();
        assert_eq!(cfg.checkpoint_interval_steps, 500);
    }

    #[test]
    fn sft_differs_from_cpt_only_in_lr_stage_and_data() {
        let cpt = plan_cpt(&CorpusStats::reference_cpt_budget(), &Overrides::default()).unwrap();
        let m = DatasetManifest { dataset_path: "sft.jsonl".into(), sample_count: 23000 };
        let sft = plan_sft(&m, &Overrides::default()).unwrap();
        assert_eq!(sft.learning_rate, 2e-6);
        let aligned = TrainConfig {
            stage: Stage::Sft,
            learning_rate: 2e-6,
            dataset_path: "sft.jsonl".into(),
            ..cpt
        };
        assert_eq!(sft, aligned);
    }

    #[test]
    fn empty_inputs_are_rejected() {
        let m = DatasetManifest { dataset_path: "x".into(), sample_count: 0 };
        assert!(matches!(plan_sft(&m, &Overrides::default()), Err(TrainPlanError::EmptyDataset)));
        let stats = CorpusStats::from_totals([]);
        assert!(matches!(plan_cpt(&stats, &Overrides::default()), Err(TrainPlanError::EmptyCorpus)));
    }

    #[test]
    fn learning_rates_print_in_exponent_form() {
        let m = DatasetManifest { dataset_path: "sft.jsonl".into(), sample_count: 1 };
        let text = emit_config(&plan_sft(&m, &Overrides::default()).unwrap());
        assert!(text.contains("learning_rate = 2e-6\n"), "{text}");
    }

    #[test]
    fn tampered_file_is_rejected() {
        let cfg = plan_cpt(&CorpusStats::reference_cpt_budget(), &Overrides::default()).unwrap();
        let text = emit_config(&cfg).replace("rank = 64", "rank = 16");
        assert!(matches!(parse_config(&text), Err(TrainPlanError::InvariantOverride { .. })));
        let text = emit_config(&cfg).replace("stage = \"CPT\"", "stage = \"SFT\"");
        assert!(matches!(parse_config(&text), Err(TrainPlanError::InvariantOverride { field: "learning_rate", .. })));
    }

    proptest! {
        #[test]
        fn emit_parse_round_trip(
            sft in any::<bool>(),
            steps in 1u64..1_000_000,
            batch in proptest::option::of(1u32..512),
            epochs in proptest::option::of(1u32..20),
            sched in proptest::option::of("[a-z_]{1,12}"),
            path in "[a-zA-Z0-9_./\"\\\\ -]{1,30}",
            scope in "[a-z+\\-]{1,30}",
        ) {
            let o = Overrides {
                checkpoint_interval_steps: Some(steps),
                batch_size: batch,
                epochs,
                scheduler: sched,
                dataset_path: Some(path.clone()),
                target_scope: Some(scope),
                ..Default::default()
            };
            prop_assume!(!path.trim().is_empty());
            let cfg = if sft {
                plan_sft(&DatasetManifest { dataset_path: path, sample_count: 5 }, &o).unwrap()
            } else {
                plan_cpt(&CorpusStats::reference_cpt_budget(), &o).unwrap()
            };
            prop_assert_eq!(parse_config(&emit_config(&cfg)).unwrap(), cfg);
        }
    }
}
