//! Command-line entry point wiring the pipeline stages to a project config.

mod commands;
mod config;
mod manifest;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use config::{CorpusInput, EndpointEntry, ProjectConfig};
pub use manifest::{FileEntry, RunManifest};

use crate::client::ClientError;
use crate::corpus::CorpusError;
use crate::evalbench::EvalError;
use crate::jsonl::JsonlError;
use crate::judging::JudgingError;
use crate::syngen::SyngenError;
use crate::trainplan::TrainPlanError;

#[derive(Debug, Parser)]
#[command(name = "finadapt", version, about = "Financial-domain adaptation pipeline: corpus, synthetic SFT data, training plans and evaluation")]
pub struct Cli {
    /// Project config file.
    #[arg(long, global = true, default_value = "finadapt.toml")]
    pub config: PathBuf,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Endpoint name from [endpoints], or a base URL.
    #[arg(long, global = true)]
    pub endpoint: Option<String>,
    /// Output directory (overrides output_dir).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Maximum in-flight requests.
    #[arg(long, global = true)]
    pub parallelism: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean, chunk and dedupe the corpus; write chunks and token stats.
    Ingest,
    /// Generate the synthetic instruction dataset.
    Synth {
        #[arg(long)]
        total: Option<usize>,
    },
    /// Write CPT/SFT training configs and the token budget check.
    Plan {
        #[arg(long, value_enum, default_value_t = StageArg::Both)]
        stage: StageArg,
        /// Corpus stats file (default: <out>/stats.json).
        #[arg(long)]
        stats: Option<PathBuf>,
        /// SFT dataset (default: <out>/dataset.jsonl).
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Run the few-shot exam benchmark.
    EvalExams,
    /// Collect gazette answers for human judgment.
    EvalGazette,
    /// Compare original, self-translated and externally translated exams.
    TranslateEval {
        /// Translator endpoint for the external condition.
        #[arg(long)]
        external: Option<String>,
    },
    /// Import or export human judgments.
    Judge {
        #[command(subcommand)]
        action: JudgeAction,
    },
    /// Score judged gazette runs and compute annotator agreement.
    Report,
    /// Serve the review API (and UI assets, if configured).
    ServeReview {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StageArg {
    Cpt,
    Sft,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum JudgeAction {
    Import { file: PathBuf },
    Export { file: PathBuf },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Syngen(#[from] SyngenError),
    #[error(transparent)]
    TrainPlan(#[from] TrainPlanError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Judging(#[from] JudgingError),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn kind(&self) -> &'static str {
        if let Some(JsonlError::Schema { .. }) = self.jsonl() {
            return "schema_violation";
        }
        match self {
            CliError::Config(_) => "config_error",
            CliError::Io { .. } => "io_error",
            CliError::Corpus(_) => "corpus_error",
            CliError::Syngen(SyngenError::QuotaUnmet { .. }) => "quota_unmet",
            CliError::Syngen(_) => "syngen_error",
            CliError::TrainPlan(TrainPlanError::InvariantOverride { .. }) => "invariant_override",
            CliError::TrainPlan(_) => "trainplan_error",
            CliError::Eval(EvalError::Transport(_)) | CliError::Client(_) => "transport_error",
            CliError::Eval(_) => "eval_error",
            CliError::Judging(_) => "judging_error",
            CliError::Jsonl(JsonlError::Schema { .. }) => "schema_violation",
            CliError::Jsonl(_) => "io_error",
            CliError::Usage(_) => "usage_error",
        }
    }

    fn jsonl(&self) -> Option<&JsonlError> {
        match self {
            CliError::Jsonl(e)
            | CliError::Eval(EvalError::Jsonl(e))
            | CliError::Judging(JudgingError::Jsonl(e))
            | CliError::Syngen(SyngenError::Jsonl(e))
            | CliError::Corpus(CorpusError::Jsonl(e)) => Some(e),
            _ => None,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({"error": self.kind(), "message": self.to_string()});
        if let Some(line) = self.jsonl().and_then(JsonlError::line) {
            v["line"] = line.into();
        }
        v
    }
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Runs one parsed invocation.
pub async fn run(cli: Cli) -> Result<(), CliError> {
    commands::dispatch(cli).await
}

/// Parses arguments, runs the command and maps failures to a JSON line on
/// stderr plus a nonzero exit code.
pub fn main_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_env("FINADAPT_LOG")
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .with_writer(std::io::stderr)
        .try_init();

    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.to_string().trim().to_string())),
    };
    let runtime = match tokio::runtime::Builder::new_multi_thread().enable_all().build() {
        Ok(r) => r,
        Err(e) => return fail(&CliError::io(Path::new("<runtime>"), e)),
    };
    match runtime.block_on(run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code())
}
