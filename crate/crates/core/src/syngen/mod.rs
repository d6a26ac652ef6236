//! Synthetic instruction data: seed prompts over corpus chunks, structured
//! rephrase-and-answer generation, quality gates and distribution-matched
//! dataset assembly.

mod assemble;
mod dataset;
mod distribution;
mod generate;
mod quality;
mod seed;
mod task;
mod templates;

pub use assemble::{assemble_dataset, Assembly, AssemblyOptions, AssemblyStats, CellShortfall, InstructionSample};
pub use dataset::{export_dataset, import_dataset};
pub use distribution::{largest_remainder, CellQuota, CellWeight, DistributionSpec};
pub use generate::{
    generation_request, parse_structured_output, request_generation, structured_output_format, EndpointGenerator,
    FnGenerator, Generator, StructuredGeneration,
};
pub use quality::{quality_check, QualityFailure, QualityLimits, QualityVerdict};
pub use seed::{build_seed_prompt, SeedPrompt};
pub use task::{is_registered, registered_tasks, AnswerFormat, TaskType};
pub use templates::{GenerationTemplate, TemplateSet};

use crate::client::ClientError;
use crate::corpus::SftSource;
use crate::jsonl::JsonlError;

#[derive(Debug, thiserror::Error)]
pub enum SyngenError {
    #[error("no chunks available for source {0:?}")]
    EmptyPool(SftSource),
    #[error("task {task} is not registered for source {sft_source:?}")]
    DisallowedPairing { task: TaskType, sft_source: SftSource },
    #[error("chunk {chunk_id} does not belong to source {expected:?}")]
    ForeignChunk { chunk_id: String, expected: SftSource },
    #[error(transparent)]
    Transport(#[from] ClientError),
    #[error("structured output malformed: {detail}")]
    MalformedStructuredOutput { detail: String, raw: String },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("quota unmet for {} cell(s): {}", shortfalls.len(), describe(shortfalls))]
    QuotaUnmet { shortfalls: Vec<CellShortfall> },
    #[error("sample {0} did not pass quality checks and cannot be exported")]
    UnpassedSample(String),
    #[error("template error: {0}")]
    Template(String),
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
}

fn describe(shortfalls: &[CellShortfall]) -> String {
    shortfalls
        .iter()
        .map(|s| format!("{}/{} {}/{}", s.source.slug(), s.task, s.produced, s.quota))
        .collect::<Vec<_>>()
        .join(", ")
}
