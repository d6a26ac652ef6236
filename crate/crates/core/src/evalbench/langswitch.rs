use serde::{Deserialize, Serialize};

use super::Language;

/// Words of 15 or more in a row are needed before a run counts as a switch.
pub const MIN_RUN_WORDS: usize = 15;
pub const MIN_STOPWORDS: usize = 3;

// Short English function words. Words that are also common Turkish words
// (an, at, can, it, on, a, in) are left out.
const ENGLISH_STOPWORDS: &[&str] = &[
    "the", "and", "of", "to", "is", "are", "was", "were", "with", "that", "this", "for", "from", "by", "which",
    "have", "has", "be", "its", "or", "not", "will", "would", "should", "their", "these", "those", "been", "into",
    "about", "there", "they", "what", "when",
];

const TURKISH_LETTERS: &[char] = &['ç', 'ğ', 'ı', 'ö', 'ş', 'ü', 'Ç', 'Ğ', 'İ', 'Ö', 'Ş', 'Ü'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchKind {
    Cjk,
    EnglishRun,
}

/// Byte range into the inspected text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceSpan {
    pub kind: SwitchKind,
    pub start: usize,
    pub end: usize,
    pub excerpt: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageSwitch {
    pub flagged: bool,
    pub spans: Vec<EvidenceSpan>,
}

pub fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3000..=0x303F      // CJK symbols and punctuation
        | 0x3040..=0x30FF    // kana
        | 0x3400..=0x4DBF
        | 0x4E00..=0x9FFF
        | 0xAC00..=0xD7AF    // hangul
        | 0xF900..=0xFAFF
        | 0xFF00..=0xFFEF    // full-width forms
        | 0x20000..=0x2FA1F)
}

fn cjk_spans(text: &str) -> Vec<EvidenceSpan> {
    let mut spans: Vec<EvidenceSpan> = Vec::new();
    for (i, c) in text.char_indices().filter(|&(_, c)| is_cjk(c)) {
        let end = i + c.len_utf8();
        match spans.last_mut() {
            Some(s) if s.end == i => s.end = end,
            _ => spans.push(EvidenceSpan { kind: SwitchKind::Cjk, start: i, end, excerpt: String::new() }),
        }
    }
    spans
}

/// Alphabetic words with byte ranges. An apostrophe between letters stays
/// inside the word, so "Şirket'in" and "don't" are one word each.
fn words(text: &str) -> Vec<(usize, usize)> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (k, &(i, c)) in chars.iter().enumerate() {
        let inner_apostrophe = matches!(c, '\'' | '’')
            && start.is_some()
            && chars.get(k + 1).is_some_and(|&(_, n)| n.is_alphabetic());
        if (c.is_alphabetic() && !is_cjk(c)) || inner_apostrophe {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            out.push((s, i));
        }
    }
    if let Some(s) = start {
        out.push((s, text.len()));
    }
    out
}

fn english_runs(text: &str) -> Vec<EvidenceSpan> {
    let mut spans = Vec::new();
    let ws = words(text);
    let mut i = 0;
    while i < ws.len() {
        let turkish = |w: &(usize, usize)| text[w.0..w.1].contains(TURKISH_LETTERS);
        if turkish(&ws[i]) {
            i += 1;
            continue;
        }
        // maximal run of words without a Turkish-specific letter; any
        // qualifying window lies inside one and the whole run has the most
        // stopwords, so testing the run is exact
        let mut j = i;
        while j < ws.len() && !turkish(&ws[j]) {
            j += 1;
        }
        let stop = ws[i..j]
            .iter()
            .filter(|w| ENGLISH_STOPWORDS.contains(&text[w.0..w.1].to_lowercase().as_str()))
            .count();
        if j - i >= MIN_RUN_WORDS && stop >= MIN_STOPWORDS {
            spans.push(EvidenceSpan {
                kind: SwitchKind::EnglishRun,
                start: ws[i].0,
                end: ws[j - 1].1,
                excerpt: String::new(),
            });
        }
        i = j;
    }
    spans
}

/// Flags replies that drift out of the expected language: any CJK
/// character, or (for Turkish) a long run of words with no Turkish letters
/// that includes several English function words.
pub fn detect_language_switch(text: &str, expected: Language) -> LanguageSwitch {
    let mut spans = cjk_spans(text);
    if expected == Language::Tr {
        spans.extend(english_runs(text));
    }
    spans.sort_by_key(|s| (s.start, s.end));
    for s in &mut spans {
        s.excerpt = text[s.start..s.end].to_string();
    }
    LanguageSwitch { flagged: !spans.is_empty(), spans }
}
