//! Small text utilities shared across modules.

/// Lowercases with Turkish dotted/dotless I rules (`I → ı`, `İ → i`).
///
/// Plain `str::to_lowercase` maps `I` to `i`, which turns "YANLIŞ" into
/// "yanliş" and breaks comparisons against "Yanlış".
pub fn turkish_fold(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            'I' => out.push('ı'),
            'İ' => out.push('i'),
            _ => out.extend(ch.to_lowercase()),
        }
    }
    // to_lowercase('İ') would be "i\u{307}", never reached above
    out
}

/// Whitespace-normalized Turkish case fold.
pub fn normalized_key(s: &str) -> String {
    s.split_whitespace()
        .map(turkish_fold)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Drops a surrounding markdown code fence (with an optional `json` tag).
pub fn strip_code_fence(s: &str) -> &str {
    let s = s.trim();
    let Some(rest) = s.strip_prefix("```") else {
        return s;
    };
    let rest = rest.strip_prefix("json").unwrap_or(rest);
    rest.strip_suffix("```").unwrap_or(rest).trim()
}
