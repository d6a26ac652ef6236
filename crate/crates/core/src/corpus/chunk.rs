//! Paragraph-first chunking of cleaned text.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{estimate_tokens, CorpusError, SourceCategory};

static PARAGRAPH_BREAK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\n[^\S\n]*\n\s*").unwrap());
static SENTENCE_END: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[.!?…]+[\)\]\x22'»”]*\s+").unwrap());

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkPolicy {
    target_tokens: usize,
    max_tokens: usize,
}

impl ChunkPolicy {
    pub fn new(target_tokens: usize, max_tokens: usize) -> Result<Self, CorpusError> {
        if target_tokens == 0 || target_tokens > max_tokens {
            return Err(CorpusError::InvalidChunkPolicy {
                target_tokens,
                max_tokens,
            });
        }
        Ok(Self {
            target_tokens,
            max_tokens,
        })
    }

    pub fn target_tokens(&self) -> usize {
        self.target_tokens
    }

    pub fn max_tokens(&self) -> usize {
        self.max_tokens
    }
}

impl Default for ChunkPolicy {
    fn default() -> Self {
        Self {
            target_tokens: 512,
            max_tokens: 640,
        }
    }
}

/// A cleaned, source-tagged slice of a document.
///
/// `span` holds character (Unicode scalar) offsets into the cleaned parent
/// text, end exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanChunk {
    pub id: String,
    pub doc_id: String,
    pub category: SourceCategory,
    pub text: String,
    pub token_estimate: usize,
    pub span: (usize, usize),
}

/// Splits cleaned text into ordered, non-overlapping chunks.
///
/// Paragraphs are packed greedily up to the target size. A paragraph over the
/// maximum is split at sentence ends, and a sentence over the maximum at word
/// boundaries, so every chunk stays within `max_tokens`.
pub fn chunk(
    doc_id: &str,
    category: SourceCategory,
    cleaned: &str,
    policy: &ChunkPolicy,
) -> Vec<CleanChunk> {
    let mut units = Vec::new();
    for para in trimmed_pieces(cleaned, 0, cleaned.len(), &PARAGRAPH_BREAK) {
        split_oversized(cleaned, para, policy.max_tokens, &mut units);
    }

    let mut spans: Vec<(usize, usize)> = Vec::new();
    for unit in units {
        match spans.last_mut() {
            Some(cur) if estimate_tokens(&cleaned[cur.0..unit.1]) <= policy.target_tokens => cur.1 = unit.1,
            _ => spans.push(unit),
        }
    }

    let mut offsets = CharOffsets::new(cleaned);
    spans
        .into_iter()
        .enumerate()
        .map(|(i, (start, end))| {
            let text = &cleaned[start..end];
            CleanChunk {
                id: format!("{doc_id}#{i:04}"),
                doc_id: doc_id.to_string(),
                category,
                text: text.to_string(),
                token_estimate: estimate_tokens(text),
                span: (offsets.char_at(start), offsets.char_at(end)),
            }
        })
        .collect()
}

/// Byte ranges of the pieces between separator matches, trimmed, empty ones dropped.
fn trimmed_pieces(text: &str, start: usize, end: usize, sep: &Regex) -> Vec<(usize, usize)> {
    let region = &text[start..end];
    let mut out = Vec::new();
    let mut last = 0;
    let mut push = |from: usize, to: usize| {
        let piece = &region[from..to];
        let lead = piece.len() - piece.trim_start().len();
        let trimmed = piece.trim();
        if !trimmed.is_empty() {
            out.push((start + from + lead, start + from + lead + trimmed.len()));
        }
    };
    for m in sep.find_iter(region) {
        push(last, m.end());
        last = m.end();
    }
    push(last, region.len());
    out
}

fn split_oversized(text: &str, span: (usize, usize), max_tokens: usize, out: &mut Vec<(usize, usize)>) {
    if estimate_tokens(&text[span.0..span.1]) <= max_tokens {
        out.push(span);
        return;
    }
    let sentences = trimmed_pieces(text, span.0, span.1, &SENTENCE_END);
    if sentences.len() > 1 {
        // sentences can be packed back together up to the target later on
        for s in sentences {
            split_oversized(text, s, max_tokens, out);
        }
        return;
    }
    // one giant sentence: hard windows of whole words
    let words_per_window = (max_tokens * 2 / 3).max(1);
    let words: Vec<(usize, usize)> = text[span.0..span.1]
        .split_whitespace()
        .map(|w| {
            let off = w.as_ptr() as usize - text.as_ptr() as usize;
            (off, off + w.len())
        })
        .collect();
    for window in words.chunks(words_per_window) {
        out.push((window[0].0, window[window.len() - 1].1));
    }
}

/// Incremental byte -> char offset conversion for ascending byte positions.
struct CharOffsets<'a> {
    text: &'a str,
    byte: usize,
    chars: usize,
}

impl<'a> CharOffsets<'a> {
    fn new(text: &'a str) -> Self {
        Self { text, byte: 0, chars: 0 }
    }

    fn char_at(&mut self, byte: usize) -> usize {
        if byte < self.byte {
            self.byte = 0;
            self.chars = 0;
        }
        self.chars += self.text[self.byte..byte].chars().count();
        self.byte = byte;
        self.chars
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CptCategory, SftSource};
    use proptest::prelude::*;

    fn cat() -> SourceCategory {
        CptCategory::Academic.into()
    }

    fn char_slice(text: &str, span: (usize, usize)) -> String {
        text.chars().skip(span.0).take(span.1 - span.0).collect()
    }

    /// Everything outside the chunk spans must be whitespace, and the spans
    /// must reproduce the chunk texts.
    fn assert_reassembles(text: &str, chunks: &[CleanChunk]) {
        let chars: Vec<char> = text.chars().collect();
        let mut pos = 0;
        for c in chunks {
            assert!(c.span.0 < c.span.1);
            assert!(pos <= c.span.0, "overlap at {pos}");
            assert!(chars[pos..c.span.0].iter().all(|ch| ch.is_whitespace()));
            assert_eq!(char_slice(text, c.span), c.text);
            pos = c.span.1;
        }
        assert!(chars[pos..].iter().all(|ch| ch.is_whitespace()));
        let joined: String = chunks.iter().map(|c| c.text.as_str()).collect::<Vec<_>>().join(" ");
        let squash = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
        assert_eq!(squash(&joined), squash(text));
    }

    fn words(n: usize, tag: &str) -> String {
        (0..n).map(|i| format!("{tag}{i}")).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn rejects_bad_policies() {
        assert!(ChunkPolicy::new(0, 10).is_err());
        assert!(ChunkPolicy::new(20, 10).is_err());
        assert!(ChunkPolicy::new(10, 10).is_ok());
    }

    #[test]
    fn short_text_is_one_chunk() {
        let text = "Merkez bankası politika faizini sabit tuttu.";
        let chunks = chunk("d", cat(), text, &ChunkPolicy::default());
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].text, text);
        assert_eq!(chunks[0].span, (0, text.chars().count()));
    }

    #[test]
    fn empty_text_has_no_chunks() {
        assert!(chunk("d", cat(), "", &ChunkPolicy::default()).is_empty());
        assert!(chunk("d", cat(), " \n\n ", &ChunkPolicy::default()).is_empty());
    }

    #[test]
    fn large_paragraphs_split_only_at_paragraph_breaks() {
        // 266 words -> ceil(1.5 * 266) = 399 tokens each
        let paras: Vec<String> = (0..3).map(|p| words(266, &format!("p{p}k"))).collect();
        let text = paras.join("\n\n");
        let chunks = chunk("d", cat(), &text, &ChunkPolicy::default());
        assert_eq!(chunks.len(), 3);
        for (c, p) in chunks.iter().zip(&paras) {
            assert_eq!(&c.text, p);
            assert_eq!(c.token_estimate, 399);
        }
        assert_reassembles(&text, &chunks);
    }

    #[test]
    fn small_paragraphs_are_packed() {
        let text = "Bir.\n\nİki.\n\nÜç.";
        let chunks = chunk("d", SftSource::News.into(), text, &ChunkPolicy::default());
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].text, text);
    }

    #[test]
    fn oversized_paragraph_falls_back_to_sentences_then_words() {
        let policy = ChunkPolicy::new(8, 10).unwrap();
        let text = format!("{}. {}. {}", words(4, "a"), words(4, "b"), words(30, "c"));
        let chunks = chunk("d", cat(), &text, &policy);
        assert!(chunks.iter().all(|c| c.token_estimate <= 10));
        assert_eq!(chunks[0].text, format!("{}.", words(4, "a")));
        assert_reassembles(&text, &chunks);
    }

    #[test]
    fn spans_are_character_offsets() {
        let text = "Şğü çalışma.\n\nİkinci öğe.";
        let policy = ChunkPolicy::new(2, 3).unwrap();
        let chunks = chunk("d", cat(), text, &policy);
        assert_eq!(chunks.len(), 2);
        assert_eq!(chunks[1].span, (14, 25));
        assert_reassembles(text, &chunks);
    }

    proptest! {
        #[test]
        fn chunks_reassemble_and_respect_max(
            paras in prop::collection::vec(prop::collection::vec("[a-zçğışöü]{1,8}[.!?]?", 1..120), 0..8),
            target in 5usize..60,
            extra in 0usize..30,
        ) {
            let text = paras.iter().map(|p| p.join(" ")).collect::<Vec<_>>().join("\n\n");
            let policy = ChunkPolicy::new(target, target + extra).unwrap();
            let chunks = chunk("d", cat(), &text, &policy);
            for c in &chunks {
                prop_assert!(c.token_estimate > 0);
                prop_assert!(c.token_estimate <= policy.max_tokens());
            }
            assert_reassembles(&text, &chunks);
        }
    }
}
