use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;

use super::CliError;
use crate::client::{EndpointDescriptor, RetryPolicy, DEFAULT_API_KEY_ENV};
use crate::corpus::{SftSource, SourceCategory};
use crate::syngen::{DistributionSpec, QualityLimits, TaskType};
use crate::trainplan::Overrides;

/// Project configuration file. Relative paths resolve against the
/// directory holding the file. Secrets never live here: endpoints name the
/// environment variable that carries their bearer token.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    #[serde(default)]
    pub corpus: CorpusSection,
    #[serde(default)]
    pub endpoints: BTreeMap<String, EndpointEntry>,
    #[serde(default)]
    pub client: ClientSection,
    #[serde(default)]
    pub synth: SynthSection,
    #[serde(default)]
    pub quality: QualityLimits,
    #[serde(default)]
    pub plan: PlanSection,
    #[serde(default)]
    pub eval: EvalSection,
    #[serde(default)]
    pub translate: TranslateSection,
    #[serde(default)]
    pub judging: JudgingSection,

    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_parallelism() -> usize {
    8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSection {
    #[serde(default)]
    pub inputs: Vec<CorpusInput>,
    #[serde(default = "default_target_tokens")]
    pub target_tokens: usize,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: usize,
    #[serde(default = "default_boilerplate_pages")]
    pub boilerplate_min_pages: usize,
}

impl Default for CorpusSection {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            target_tokens: default_target_tokens(),
            max_tokens: default_max_tokens(),
            boilerplate_min_pages: default_boilerplate_pages(),
        }
    }
}

fn default_target_tokens() -> usize {
    512
}
fn default_max_tokens() -> usize {
    640
}
fn default_boilerplate_pages() -> usize {
    3
}

/// A file or directory of `.txt` / `.jsonl` documents. Plain-text files
/// take `category`; JSONL documents carry their own.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusInput {
    pub path: PathBuf,
    pub category: Option<SourceCategory>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointEntry {
    pub base_url: String,
    pub model: String,
    #[serde(default = "default_key_env")]
    pub api_key_env: String,
}

fn default_key_env() -> String {
    DEFAULT_API_KEY_ENV.to_string()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClientSection {
    pub max_retries: u32,
    pub base_delay_ms: u64,
    pub max_delay_ms: u64,
}

impl Default for ClientSection {
    fn default() -> Self {
        let r = RetryPolicy::default();
        Self {
            max_retries: r.max_retries,
            base_delay_ms: r.base_delay.as_millis() as u64,
            max_delay_ms: r.max_delay.as_millis() as u64,
        }
    }
}

impl ClientSection {
    pub fn retry_policy(&self) -> RetryPolicy {
        RetryPolicy {
            max_retries: self.max_retries,
            base_delay: Duration::from_millis(self.base_delay_ms),
            max_delay: Duration::from_millis(self.max_delay_ms),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub total: usize,
    pub generator: Option<String>,
    pub temperature: f64,
    /// Chunk file to draw reference text from; defaults to the ingest output.
    pub chunks: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub attempt_factor: usize,
    pub task_pct: Option<BTreeMap<TaskType, f64>>,
    pub source_pct: Option<BTreeMap<SftSource, f64>>,
}

impl Default for SynthSection {
    fn default() -> Self {
        Self {
            total: 23_000,
            generator: None,
            temperature: 0.7,
            chunks: None,
            templates: None,
            attempt_factor: 5,
            task_pct: None,
            source_pct: None,
        }
    }
}

impl SynthSection {
    pub fn distribution(&self, total: usize) -> DistributionSpec {
        let mut spec = DistributionSpec::reference(total);
        if let Some(t) = &self.task_pct {
            spec.task_pct = t.clone();
        }
        if let Some(s) = &self.source_pct {
            spec.source_pct = s.clone();
        }
        spec
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanSection {
    pub cpt: Overrides,
    pub sft: Overrides,
    /// Reference token budget per category; defaults to the built-in reference vector.
    pub reference_budget: Option<BTreeMap<SourceCategory, u64>>,
    pub budget_tolerance_pct: f64,
}

impl Default for PlanSection {
    fn default() -> Self {
        Self {
            cpt: Overrides::default(),
            sft: Overrides::default(),
            reference_budget: None,
            budget_tolerance_pct: 5.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub exams: Option<PathBuf>,
    /// Exemplar pool for few-shot prompts; defaults to the exam set itself.
    pub exemplars: Option<PathBuf>,
    pub gazette: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub shots: usize,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for EvalSection {
    fn default() -> Self {
        Self {
            exams: None,
            exemplars: None,
            gazette: None,
            endpoint: None,
            shots: crate::evalbench::DEFAULT_SHOTS,
            temperature: 0.0,
            max_tokens: 512,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TranslateSection {
    pub external_endpoint: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JudgingSection {
    /// Named answer files to judge side by side; defaults to the single
    /// gazette run in the output directory.
    pub runs: BTreeMap<String, PathBuf>,
    pub log: Option<PathBuf>,
    pub static_dir: Option<PathBuf>,
}

impl ProjectConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: ProjectConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        if cfg.parallelism == 0 {
            return Err(CliError::Config("parallelism must be at least 1".into()));
        }
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Resolves a configured input path and checks that it exists.
    pub fn existing(&self, p: &Path, what: &str) -> Result<PathBuf, CliError> {
        let full = self.resolve(p);
        if full.exists() {
            Ok(full)
        } else {
            Err(CliError::Config(format!("{what} {} does not exist", full.display())))
        }
    }

    pub fn required<'a>(&self, value: &'a Option<PathBuf>, key: &str) -> Result<&'a Path, CliError> {
        value.as_deref().ok_or_else(|| CliError::Config(format!("{key} is not set")))
    }

    /// Looks up an endpoint by name. A bare http(s) URL is accepted as an
    /// ad-hoc endpoint with model "default".
    pub fn endpoint(&self, name: &str) -> Result<EndpointDescriptor, CliError> {
        if let Some(e) = self.endpoints.get(name) {
            let mut d = EndpointDescriptor::new(name, e.base_url.clone(), e.model.clone());
            d.api_key_env = e.api_key_env.clone();
            return Ok(d);
        }
        if name.starts_with("http://") || name.starts_with("https://") {
            return Ok(EndpointDescriptor::new(name, name, "default"));
        }
        Err(CliError::Config(format!("no endpoint named {name:?} in [endpoints]")))
    }
}
