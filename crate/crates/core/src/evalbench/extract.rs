use super::{Choice, Extraction};

fn is_word_char(c: Option<char>) -> bool {
    c.is_some_and(char::is_alphanumeric)
}

/// Reads the chosen option out of a free-text reply.
///
/// Rules, in order: the first standalone option letter (a token that is
/// exactly one of the offered uppercase labels, so "B", "B)", "B." and
/// "B:" all count); otherwise the option whose full text appears earliest
/// in the reply; otherwise Abstain.
pub fn extract_choice(raw: &str, options: &[(Choice, String)]) -> Extraction {
    let chars: Vec<char> = raw.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        let Some(choice) = Choice::from_letter(c) else { continue };
        if !options.iter().any(|(l, _)| *l == choice) {
            continue;
        }
        let before = if i == 0 { None } else { Some(chars[i - 1]) };
        if !is_word_char(before) && !is_word_char(chars.get(i + 1).copied()) {
            return Extraction::Choice(choice);
        }
    }

    // earliest match wins; at equal offsets the longer text is the more specific one
    options
        .iter()
        .filter(|(_, text)| !text.trim().is_empty())
        .filter_map(|(label, text)| raw.find(text.trim()).map(|pos| (pos, std::cmp::Reverse(text.trim().len()), *label)))
        .min()
        .map_or(Extraction::Abstain, |(_, _, label)| Extraction::Choice(label))
}
