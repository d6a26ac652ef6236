use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{is_registered, SyngenError, TaskType, TemplateSet};
use crate::corpus::{CleanChunk, SftSource, SourceCategory};
use crate::seeding::rng_for;

/// A task template instantiated with one reference chunk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPrompt {
    pub task: TaskType,
    pub sft_source: SftSource,
    pub reference_chunk: CleanChunk,
    pub instruction_text: String,
    pub rng_seed: u64,
}

impl SeedPrompt {
    pub(crate) fn from_chunk(
        task: TaskType,
        source: SftSource,
        chunk: &CleanChunk,
        rng_seed: u64,
        templates: &TemplateSet,
    ) -> Self {
        Self {
            task,
            sft_source: source,
            reference_chunk: chunk.clone(),
            instruction_text: templates.seed_prompt(task, &chunk.text),
            rng_seed,
        }
    }
}

pub(crate) fn check_pool(task: TaskType, source: SftSource, pool: &[CleanChunk]) -> Result<(), SyngenError> {
    if !is_registered(source, task) {
        return Err(SyngenError::DisallowedPairing { task, sft_source: source });
    }
    if pool.is_empty() {
        return Err(SyngenError::EmptyPool(source));
    }
    if let Some(c) = pool.iter().find(|c| c.category != SourceCategory::Sft(source)) {
        return Err(SyngenError::ForeignChunk {
            chunk_id: c.id.clone(),
            expected: source,
        });
    }
    Ok(())
}

/// Draws one chunk from the pool with a seeded RNG and instantiates the
/// task's template around it.
pub fn build_seed_prompt(
    task: TaskType,
    source: SftSource,
    pool: &[CleanChunk],
    rng_seed: u64,
    templates: &TemplateSet,
) -> Result<SeedPrompt, SyngenError> {
    check_pool(task, source, pool)?;
    let idx = rng_for(rng_seed).random_range(0..pool.len());
    Ok(SeedPrompt::from_chunk(task, source, &pool[idx], rng_seed, templates))
}

/// Pool indices without replacement (a seeded shuffle) until the pool is
/// exhausted, then uniform draws with replacement.
pub(crate) struct ChunkSampler {
    rng: ChaCha8Rng,
    order: Vec<usize>,
    next: usize,
}

impl ChunkSampler {
    pub(crate) fn new(pool_len: usize, seed: u64) -> Self {
        let mut rng = rng_for(seed);
        let mut order: Vec<usize> = (0..pool_len).collect();
        order.shuffle(&mut rng);
        Self { rng, order, next: 0 }
    }

    pub(crate) fn draw(&mut self) -> usize {
        let i = if self.next < self.order.len() {
            self.order[self.next]
        } else {
            self.rng.random_range(0..self.order.len())
        };
        self.next += 1;
        i
    }
}
