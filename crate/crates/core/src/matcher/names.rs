//! Surname extraction and diacritic folding for author matching.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

const SUFFIXES: [&str; 9] = ["jr", "jr.", "sr", "sr.", "ii", "iii", "iv", "2nd", "3rd"];

fn is_suffix(token: &str) -> bool {
    let t = token.trim_end_matches(',');
    SUFFIXES.iter().any(|s| t.eq_ignore_ascii_case(s))
        // DBLP disambiguates homonyms with a numeric token ("Wei Wang 0003").
        || (!t.is_empty() && t.bytes().all(|b| b.is_ascii_digit()))
}

/// Family name of a display name.
///
/// "Lee, Ann" is read surname-first; otherwise the last whitespace token wins
/// after generational suffixes and DBLP homonym numbers are dropped.
pub fn extract_surname(full: &str) -> String {
    let mut parts: Vec<&str> = full.split(',').map(str::trim).collect();
    while parts.len() > 1 && parts.last().is_some_and(|p| p.is_empty() || is_suffix(p)) {
        parts.pop();
    }
    // With or without a comma the family name is in the first part.
    surname_from_family(parts[0])
}

/// Last significant token of an explicit family-name field
/// ("van der Berg" -> "Berg").
pub fn surname_from_family(family: &str) -> String {
    let mut tokens: Vec<&str> = family.split_whitespace().collect();
    while tokens.len() > 1 && tokens.last().is_some_and(|t| is_suffix(t)) {
        tokens.pop();
    }
    tokens
        .last()
        .map(|t| t.trim_end_matches(',').to_string())
        .unwrap_or_default()
}

/// Lowercases, strips combining marks after canonical decomposition, and maps
/// the letters that have no decomposition (ø, ß, æ, ł, ...).
pub fn fold_diacritics(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.to_lowercase().nfd() {
        if is_combining_mark(c) {
            continue;
        }
        match c {
            'ø' => out.push('o'),
            'ß' => out.push_str("ss"),
            'æ' => out.push_str("ae"),
            'œ' => out.push_str("oe"),
            'ł' => out.push('l'),
            'đ' | 'ð' => out.push('d'),
            'þ' => out.push_str("th"),
            'ı' => out.push('i'),
            _ => out.push(c),
        }
    }
    out
}

/// Folded surname used for exact matching: diacritics removed, lowercase,
/// punctuation other than hyphens dropped.
pub fn fold(surname: &str) -> String {
    let folded = fold_diacritics(surname);
    let filtered: String = folded
        .chars()
        .filter(|c| c.is_alphanumeric() || *c == '-')
        .collect();
    if filtered.is_empty() {
        folded.trim().to_string()
    } else {
        filtered
    }
}
