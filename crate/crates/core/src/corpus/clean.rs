//! Text normalization for extracted documents.
//!
//! Pages are delimited by form feeds (`\x0c`), which is what most
//! PDF/OCR text extractors emit between pages. The output is NFC text with
//! one paragraph per line and paragraphs separated by a single blank line.

use std::collections::{HashMap, HashSet};

use unicode_normalization::UnicodeNormalization;

use super::RawDocument;

const PAGE_BREAK: char = '\u{c}';

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleaningProfile {
    /// A line recurring verbatim on at least this many pages is treated as a
    /// running header or footer and dropped everywhere.
    pub boilerplate_min_pages: usize,
    /// Rejoin words split across lines by a trailing hyphen.
    pub dehyphenate: bool,
}

impl Default for CleaningProfile {
    fn default() -> Self {
        Self {
            boilerplate_min_pages: 3,
            dehyphenate: true,
        }
    }
}

pub fn clean_text(doc: &RawDocument, profile: &CleaningProfile) -> String {
    clean_str(&doc.text, profile)
}

/// Cleans raw extracted text. Idempotent: `clean_str(clean_str(x)) == clean_str(x)`.
pub fn clean_str(text: &str, profile: &CleaningProfile) -> String {
    let text: String = text.nfc().collect();
    let text = text.replace("\r\n", "\n").replace('\r', "\n");

    let pages: Vec<Vec<String>> = text
        .split(PAGE_BREAK)
        .map(|page| page.split('\n').map(collapse_spaces).collect())
        .collect();
    let boilerplate = boilerplate_lines(&pages, profile.boilerplate_min_pages);

    let mut paragraphs: Vec<String> = Vec::new();
    let mut current: Option<String> = None;
    for line in pages.into_iter().flatten() {
        if line.is_empty() {
            if let Some(p) = current.take() {
                paragraphs.push(p);
            }
            continue;
        }
        if boilerplate.contains(&line) {
            continue;
        }
        current = Some(match current {
            None => line,
            Some(mut para) => {
                join_line(&mut para, &line, profile.dehyphenate);
                para
            }
        });
    }
    paragraphs.extend(current);

    paragraphs.join("\n\n").nfc().collect()
}

fn collapse_spaces(line: &str) -> String {
    line.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn boilerplate_lines(pages: &[Vec<String>], min_pages: usize) -> HashSet<String> {
    if min_pages == 0 || pages.len() < min_pages {
        return HashSet::new();
    }
    let mut seen_on: HashMap<&str, usize> = HashMap::new();
    for page in pages {
        let distinct: HashSet<&str> = page
            .iter()
            .map(String::as_str)
            .filter(|l| !l.is_empty())
            .collect();
        for line in distinct {
            *seen_on.entry(line).or_default() += 1;
        }
    }
    seen_on
        .into_iter()
        .filter(|&(_, n)| n >= min_pages)
        .map(|(line, _)| line.to_string())
        .collect()
}

fn join_line(para: &mut String, next: &str, dehyphenate: bool) {
    if dehyphenate && para.ends_with('-') {
        let before_hyphen = para[..para.len() - 1].chars().next_back();
        let next_first = next.chars().next();
        if before_hyphen.is_some_and(char::is_alphabetic) && next_first.is_some_and(char::is_lowercase) {
            para.pop();
            para.push_str(next);
            return;
        }
    }
    para.push(' ');
    para.push_str(next);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn clean(s: &str) -> String {
        clean_str(s, &CleaningProfile::default())
    }

    #[test]
    fn dehyphenates_line_wraps() {
        assert_eq!(clean("kre-\ndisi"), "kredisi");
        assert_eq!(clean("banka kre-  \n  disi verildi"), "banka kredisi verildi");
        // a capitalized continuation is a real compound, not a wrap
        assert_eq!(clean("Ankara-\nİstanbul"), "Ankara- İstanbul");
    }

    #[test]
    fn collapses_whitespace_runs() {
        assert_eq!(clean("a  \t b"), "a b");
    }

    #[test]
    fn keeps_paragraphs_as_single_blank_lines() {
        let input = "Birinci satır\nikinci satır\n\n\n\n  Yeni paragraf.  \n";
        assert_eq!(clean(input), "Birinci satır ikinci satır\n\nYeni paragraf.");
    }

    #[test]
    fn normalizes_to_nfc() {
        // "ş" as s + combining cedilla
        let decomposed = "s\u{327}irket";
        assert_eq!(clean(decomposed), "şirket");
    }

    #[test]
    fn strips_running_headers() {
        let pages: Vec<String> = (1..=5)
            .map(|i| format!("SAYFA 3\nSayfa {i} gövde metni burada.\n\nİkinci paragraf {i}.\nRapor 2021"))
            .collect();
        let raw = pages.join("\u{c}");
        let cleaned = clean(&raw);

        // independent scan: count the pages each raw line occurs on
        let mut page_counts: HashMap<String, usize> = HashMap::new();
        for page in raw.split('\u{c}') {
            let uniq: HashSet<&str> = page.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
            for l in uniq {
                *page_counts.entry(l.to_string()).or_default() += 1;
            }
        }
        let recurring: Vec<&String> = page_counts.iter().filter(|(_, &n)| n >= 3).map(|(l, _)| l).collect();
        assert_eq!(recurring.len(), 2);
        for line in recurring {
            assert!(!cleaned.contains(line.as_str()), "{line} survived");
        }
        assert!(cleaned.contains("Sayfa 4 gövde metni burada."));
    }

    #[test]
    fn lines_on_two_pages_are_not_boilerplate() {
        let raw = "Başlık\nmetin bir\u{c}Başlık\nmetin iki\u{c}metin üç";
        assert!(clean(raw).contains("Başlık"));
    }

    proptest! {
        #[test]
        fn cleaning_is_idempotent(s in "[a-zçğışöü \\-\t\n\u{c}A-Z.]{0,200}") {
            let once = clean(&s);
            prop_assert_eq!(clean(&once), once.clone());
        }

        #[test]
        fn cleaning_is_idempotent_on_any_unicode(s in any::<String>()) {
            let once = clean(&s);
            prop_assert_eq!(clean(&once), once.clone());
        }
    }
}
