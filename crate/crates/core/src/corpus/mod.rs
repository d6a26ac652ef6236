//! Corpus preparation: ingestion, cleaning, chunking, deduplication and
//! token accounting per source category.

mod category;
mod chunk;
mod clean;
mod document;
mod stats;

use std::collections::HashSet;

use rayon::prelude::*;

pub use category::{CptCategory, SftSource, SourceCategory, UnknownCategory};
pub use chunk::{chunk, ChunkPolicy, CleanChunk};
pub use clean::{clean_str, clean_text, CleaningProfile};
pub use document::{ingest_document, Corpus, RawDocument};
pub use stats::{corpus_stats, CorpusStats};

use crate::jsonl::JsonlError;
use crate::text::normalized_key;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("document from {origin:?} has no non-whitespace content")]
    EmptyDocument { origin: String },
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("invalid chunk policy: target {target_tokens}, max {max_tokens}")]
    InvalidChunkPolicy { target_tokens: usize, max_tokens: usize },
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
}

/// Token estimate: whitespace-delimited words × 1.5, rounded up.
pub fn estimate_tokens(text: &str) -> usize {
    let words = text.split_whitespace().count();
    (3 * words).div_ceil(2)
}

/// Drops chunks whose case-folded, whitespace-normalized text was already seen.
/// Keeps the first occurrence and the original order.
pub fn dedupe(chunks: Vec<CleanChunk>) -> Vec<CleanChunk> {
    let mut seen = HashSet::new();
    chunks
        .into_iter()
        .filter(|c| seen.insert(normalized_key(&c.text)))
        .collect()
}

/// Output of [`prepare`].
#[derive(Debug, Clone)]
pub struct PreparedCorpus {
    pub chunks: Vec<CleanChunk>,
    pub stats: CorpusStats,
}

/// Clean, chunk and dedupe every document, then total the tokens.
///
/// Documents are processed in parallel; output order follows document order.
pub fn prepare(docs: &[RawDocument], profile: &CleaningProfile, policy: &ChunkPolicy) -> PreparedCorpus {
    let per_doc: Vec<Vec<CleanChunk>> = docs
        .par_iter()
        .map(|doc| chunk(&doc.id, doc.category, &clean_text(doc, profile), policy))
        .collect();
    let chunks = dedupe(per_doc.into_iter().flatten().collect());
    let stats = corpus_stats(&chunks);
    PreparedCorpus { chunks, stats }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(id: &str, text: &str) -> CleanChunk {
        CleanChunk {
            id: id.into(),
            doc_id: "d".into(),
            category: SftSource::News.into(),
            text: text.into(),
            token_estimate: estimate_tokens(text).max(1),
            span: (0, 1),
        }
    }

    #[test]
    fn estimator_matches_hand_computation() {
        assert_eq!(estimate_tokens(""), 0);
        // two words: ceil(2 * 1.5) = 3
        assert_eq!(estimate_tokens("merhaba dünya"), 3);
        // three words: ceil(4.5) = 5
        assert_eq!(estimate_tokens("  bir\tiki\nüç "), 5);
    }

    proptest! {
        #[test]
        fn estimator_is_monotone_under_concatenation(a in ".{0,60}", b in ".{0,60}") {
            let ab = format!("{a}{b}");
            prop_assert!(estimate_tokens(&ab) >= estimate_tokens(&a).max(estimate_tokens(&b)));
        }

        #[test]
        fn dedupe_is_idempotent_and_stable(texts in prop::collection::vec("[ab ]{0,4}", 0..40)) {
            let chunks: Vec<CleanChunk> = texts.iter().enumerate().map(|(i, t)| c(&i.to_string(), t)).collect();
            let once = dedupe(chunks.clone());
            prop_assert_eq!(dedupe(once.clone()), once.clone());
            // survivors keep their relative order
            let ids: Vec<usize> = once.iter().map(|c| c.id.parse().unwrap()).collect();
            prop_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn dedupe_keeps_first_occurrence() {
        let out = dedupe(vec![c("c1", "Faiz arttı."), c("c1-copy", "faiz   ARTTI."), c("c2", "Kur düştü.")]);
        let ids: Vec<&str> = out.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["c1", "c2"]);
        assert!(dedupe(vec![]).is_empty());
    }

    #[test]
    fn dedupe_matches_pairwise_oracle_on_planted_duplicates() {
        let mut chunks: Vec<CleanChunk> = (0..83).map(|i| c(&format!("u{i}"), &format!("benzersiz metin {i}"))).collect();
        // 17 planted copies differing only in case and spacing
        for k in 0..17 {
            let src = k * 4;
            let variant = format!("  BENZERSIZ\tmetin   {src} ").replace("SIZ", "siz");
            chunks.insert(src + k + 1, c(&format!("dup{k}"), &variant));
        }
        assert_eq!(chunks.len(), 100);

        // brute force: a chunk survives if no earlier chunk normalizes equal
        let norm = |s: &str| crate::text::turkish_fold(&s.split_whitespace().collect::<Vec<_>>().join(" "));
        let oracle: Vec<String> = (0..chunks.len())
            .filter(|&i| (0..i).all(|j| norm(&chunks[j].text) != norm(&chunks[i].text)))
            .map(|i| chunks[i].id.clone())
            .collect();

        let out = dedupe(chunks);
        assert_eq!(out.len(), 83);
        assert_eq!(out.iter().map(|c| c.id.clone()).collect::<Vec<_>>(), oracle);
    }

    #[test]
    fn prepare_is_independent_of_thread_scheduling() {
        let docs: Vec<RawDocument> = (0..40)
            .map(|i| ingest_document(format!("Belge {i}.\n\nOrtak paragraf."), CptCategory::Academic.into(), format!("o{i}")).unwrap())
            .collect();
        let a = prepare(&docs, &CleaningProfile::default(), &ChunkPolicy::new(2, 4).unwrap());
        let b = prepare(&docs, &CleaningProfile::default(), &ChunkPolicy::new(2, 4).unwrap());
        assert_eq!(a.chunks, b.chunks);
        // the shared paragraph survives once
        assert_eq!(a.chunks.iter().filter(|c| c.text == "Ortak paragraf.").count(), 1);
        assert_eq!(a.chunks.len(), 41);
        assert_eq!(a.stats.grand_total(), a.chunks.iter().map(|c| c.token_estimate as u64).sum::<u64>());
    }
}
