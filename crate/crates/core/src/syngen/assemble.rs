use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::seed::{check_pool, ChunkSampler};
use super::{
    quality_check, CellQuota, DistributionSpec, Generator, QualityLimits, QualityVerdict, SeedPrompt, SyngenError,
    TaskType, TemplateSet,
};
use crate::client::map_bounded;
use crate::corpus::{CleanChunk, SftSource};
use crate::seeding::derive_seed;

/// One generated (prompt, answer) pair with provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionSample {
    pub id: String,
    pub task: TaskType,
    pub sft_source: SftSource,
    pub prompt: String,
    pub answer: String,
    /// The reference text the answer was grounded in.
    pub context: String,
    pub chunk_id: String,
    pub verdict: QualityVerdict,
}

#[derive(Debug, Clone)]
pub struct AssemblyOptions {
    pub rng_seed: u64,
    pub limits: QualityLimits,
    /// Attempts allowed per cell, as a multiple of its quota.
    pub attempt_factor: usize,
    pub parallelism: usize,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            rng_seed: 0,
            limits: QualityLimits::default(),
            attempt_factor: 5,
            parallelism: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellShortfall {
    pub source: SftSource,
    pub task: TaskType,
    pub quota: usize,
    pub produced: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblyStats {
    pub attempts: usize,
    pub rejected: usize,
    pub malformed: usize,
}

#[derive(Debug, Clone)]
pub struct Assembly {
    pub samples: Vec<InstructionSample>,
    pub quotas: Vec<CellQuota>,
    pub stats: AssemblyStats,
}

/// Generates the dataset cell by cell until each quota is met with samples
/// that pass the quality gates.
///
/// Each cell draws chunks from its source pool with a stream seeded from
/// `(rng_seed, cell)`, so the output depends only on the seed and the
/// generator, never on request completion order. Samples are ordered by cell
/// and then by draw index.
pub async fn assemble_dataset<G: Generator + ?Sized>(
    spec: &DistributionSpec,
    generator: &G,
    pools: &BTreeMap<SftSource, Vec<CleanChunk>>,
    templates: &TemplateSet,
    opts: &AssemblyOptions,
) -> Result<Assembly, SyngenError> {
    let quotas = spec.cell_quotas()?;
    let empty = Vec::new();
    for q in quotas.iter().filter(|q| q.quota > 0) {
        check_pool(q.task, q.source, pools.get(&q.source).unwrap_or(&empty))?;
    }

    let mut samples = Vec::with_capacity(spec.total);
    let mut stats = AssemblyStats::default();
    let mut shortfalls = Vec::new();

    for q in &quotas {
        if q.quota == 0 {
            continue;
        }
        let pool = &pools[&q.source];
        let cell = format!("{}/{}", q.source.slug(), q.task.slug());
        let mut sampler = ChunkSampler::new(pool.len(), derive_seed(opts.rng_seed, &cell));
        let budget = q.quota * opts.attempt_factor;
        let mut attempted = 0;
        let mut accepted: Vec<InstructionSample> = Vec::new();

        while accepted.len() < q.quota && attempted < budget {
            let batch = (q.quota - accepted.len()).min(budget - attempted);
            let seeds: Vec<SeedPrompt> = (attempted..attempted + batch)
                .map(|draw| {
                    let chunk = &pool[sampler.draw()];
                    let seed = derive_seed(opts.rng_seed, &format!("{cell}#{draw}"));
                    SeedPrompt::from_chunk(q.task, q.source, chunk, seed, templates)
                })
                .collect();
            attempted += batch;

            let results = map_bounded(seeds, opts.parallelism, |seed| async move {
                let out = generator.generate(&seed).await;
                (seed, out)
            })
            .await;

            for (seed, result) in results {
                stats.attempts += 1;
                let generation = match result {
                    Ok(g) => g,
                    Err(SyngenError::MalformedStructuredOutput { detail, .. }) => {
                        tracing::debug!(%cell, %detail, "malformed generation");
                        stats.malformed += 1;
                        stats.rejected += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let verdict = quality_check(&generation, q.task, &opts.limits);
                if !verdict.passed {
                    stats.rejected += 1;
                    continue;
                }
                if accepted.len() < q.quota {
                    accepted.push(InstructionSample {
                        id: format!("{}-{}-{:05}", q.source.slug(), q.task.slug(), accepted.len()),
                        task: q.task,
                        sft_source: q.source,
                        prompt: generation.rephrased_prompt.trim().to_string(),
                        answer: generation.answer.trim().to_string(),
                        context: seed.reference_chunk.text.clone(),
                        chunk_id: seed.reference_chunk.id.clone(),
                        verdict,
                    });
                }
            }
        }

        if accepted.len() < q.quota {
            shortfalls.push(CellShortfall {
                source: q.source,
                task: q.task,
                quota: q.quota,
                produced: accepted.len(),
            });
        }
        samples.extend(accepted);
    }

    if !shortfalls.is_empty() {
        return Err(SyngenError::QuotaUnmet { shortfalls });
    }
    Ok(Assembly { samples, quotas, stats })
}
