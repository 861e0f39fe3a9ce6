//! Normalization of user-entered arXiv identifiers and URLs.

use thiserror::Error;

use crate::model::ArxivId;

const PREFIXES: [&str; 3] = ["arxiv:", "abs/", "pdf/"];
const PDF_SUFFIX: &str = ".pdf";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdError {
    #[error("input is empty")]
    EmptyInput,
    #[error("nothing left of {0:?} after stripping prefixes and suffixes")]
    EmptyAfterStripping(String),
    #[error("{0:?} does not look like an arXiv identifier")]
    Implausible(String),
}

/// Turns a bare id, a prefixed id (`arXiv:2101.00001v2`) or an abstract/PDF
/// URL into an [`ArxivId`].
///
/// Everything up to and including the last occurrence of `arxiv:`, `abs/` or
/// `pdf/` (matched case-insensitively) is removed, then a trailing `.pdf`,
/// then the rest is lowercased and a trailing `vN` is split off.
pub fn normalize_arxiv_input(raw: &str) -> Result<ArxivId, IdError> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(IdError::EmptyInput);
    }

    let mut rest = &trimmed[last_prefix_end(trimmed)..];
    while ends_with_ignore_ascii_case(rest, PDF_SUFFIX) {
        rest = &rest[..rest.len() - PDF_SUFFIX.len()];
    }
    let lowered = rest.trim().to_lowercase();
    if lowered.is_empty() {
        return Err(IdError::EmptyAfterStripping(raw.to_string()));
    }

    let (normalized, version) = split_version(&lowered);
    if !is_plausible(normalized) {
        return Err(IdError::Implausible(raw.to_string()));
    }
    Ok(ArxivId {
        raw: raw.to_string(),
        normalized: normalized.to_string(),
        version,
    })
}

/// Byte offset just past the right-most prefix occurrence, or 0.
fn last_prefix_end(s: &str) -> usize {
    let bytes = s.as_bytes();
    let mut best = 0;
    for prefix in PREFIXES {
        let p = prefix.as_bytes();
        if bytes.len() < p.len() {
            continue;
        }
        for start in (0..=bytes.len() - p.len()).rev() {
            if bytes[start..start + p.len()].eq_ignore_ascii_case(p) {
                best = best.max(start + p.len());
                break;
            }
        }
    }
    best
}

fn ends_with_ignore_ascii_case(s: &str, suffix: &str) -> bool {
    s.len() >= suffix.len()
        && s.as_bytes()[s.len() - suffix.len()..].eq_ignore_ascii_case(suffix.as_bytes())
}

// A head that would itself split again ("1v1v2") is left whole so that
// normalizing a normalized id is the identity.
fn split_version(id: &str) -> (&str, Option<u32>) {
    match version_suffix(id) {
        Some((head, n)) if version_suffix(head).is_none() => (head, Some(n)),
        _ => (id, None),
    }
}

fn version_suffix(id: &str) -> Option<(&str, u32)> {
    if let Some(pos) = id.rfind('v') {
        let (head, tail) = (&id[..pos], &id[pos + 1..]);
        let digits_only = !tail.is_empty() && tail.bytes().all(|b| b.is_ascii_digit());
        if digits_only && head.ends_with(|c: char| c.is_ascii_digit()) {
            if let Ok(n) = tail.parse::<u32>() {
                if n > 0 {
                    return Some((head, n));
                }
            }
        }
    }
    None
}

// Both id schemes ("2101.00001", "hep-th/9901001") use this alphabet and
// carry digits. Anything else cannot be sent to the arXiv API meaningfully.
fn is_plausible(id: &str) -> bool {
    id.bytes().any(|b| b.is_ascii_digit())
        && id
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'/' | b'_'))
}
