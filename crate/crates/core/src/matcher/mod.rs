//! Weak and strong candidate filtering.
//!
//! Weak filtering drops candidates that are the preprint itself, that carry
//! neither publication types nor a venue, or whose DOI disagrees with the
//! preprint's. Strong filtering adds a normalized-Levenshtein title check and
//! a folded-surname author check. Candidates a database linked directly to the
//! arXiv id only go through the weak rules.

mod levenshtein;
pub mod names;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use levenshtein::levenshtein;

use crate::model::{
    collapse_whitespace, dedup_candidates, display_order, FilterDecision, FilterMode, FilterRule,
    PersonName, PreprintRecord, PublicationCandidate, ResolutionReport, SourceDatabase,
};
use crate::providers::ProviderResult;

/// Acceptance thresholds for strong filtering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchThresholds {
    /// A title is accepted when its distance ratio is strictly below this.
    pub title_ratio_max: f64,
    /// Authors are accepted when the matched ratio strictly exceeds this.
    pub author_ratio_min: f64,
}

impl Default for MatchThresholds {
    fn default() -> Self {
        MatchThresholds {
            title_ratio_max: 0.05,
            author_ratio_min: 0.70,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchError {
    #[error("threshold {name} = {value} is outside [0, 1]")]
    ThresholdOutOfRange { name: &'static str, value: f64 },
    #[error("title is empty after normalization")]
    DegenerateTitle,
}

impl MatchThresholds {
    pub fn new(title_ratio_max: f64, author_ratio_min: f64) -> Result<Self, MatchError> {
        let t = MatchThresholds {
            title_ratio_max,
            author_ratio_min,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), MatchError> {
        for (name, value) in [
            ("title_ratio_max", self.title_ratio_max),
            ("author_ratio_min", self.author_ratio_min),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(MatchError::ThresholdOutOfRange { name, value });
            }
        }
        Ok(())
    }
}

/// Accept/reject together with the measured ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchDecision {
    pub accepted: bool,
    pub ratio: f64,
}

pub fn normalize_title(title: &str) -> String {
    collapse_whitespace(&title.to_lowercase())
}

/// Levenshtein distance of the normalized titles divided by the longer
/// normalized title's length in characters.
pub fn title_ratio(a: &str, b: &str) -> Result<f64, MatchError> {
    let (a, b) = (normalize_title(a), normalize_title(b));
    let longest = a.chars().count().max(b.chars().count());
    if a.is_empty() || b.is_empty() {
        return Err(MatchError::DegenerateTitle);
    }
    Ok(levenshtein(&a, &b) as f64 / longest as f64)
}

pub fn title_match(
    preprint_title: &str,
    candidate_title: &str,
    t: &MatchThresholds,
) -> Result<MatchDecision, MatchError> {
    let ratio = title_ratio(preprint_title, candidate_title)?;
    Ok(MatchDecision {
        accepted: ratio < t.title_ratio_max,
        ratio,
    })
}

/// Greedy one-to-one matching of folded surnames, divided by the larger list
/// length. Names with an empty surname never match.
pub fn author_ratio(a: &[PersonName], b: &[PersonName]) -> f64 {
    let denominator = a.len().max(b.len());
    if denominator == 0 {
        return 0.0;
    }
    let mut unused: Vec<&str> = b.iter().map(|p| p.folded_surname.as_str()).collect();
    let mut matched = 0usize;
    for name in a {
        let key = name.folded_surname.as_str();
        if key.is_empty() {
            continue;
        }
        if let Some(pos) = unused.iter().position(|u| *u == key) {
            unused.swap_remove(pos);
            matched += 1;
        }
    }
    matched as f64 / denominator as f64
}

pub fn author_match(
    preprint_authors: &[PersonName],
    candidate_authors: &[PersonName],
    t: &MatchThresholds,
) -> MatchDecision {
    let ratio = author_ratio(preprint_authors, candidate_authors);
    MatchDecision {
        accepted: ratio > t.author_ratio_min,
        ratio,
    }
}

/// Accepted candidates and one trace entry per input candidate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterOutput {
    pub accepted: Vec<PublicationCandidate>,
    pub trace: Vec<FilterDecision>,
}

fn mentions_arxiv(venue: &str) -> bool {
    let v = venue.trim().to_ascii_lowercase();
    v.contains("arxiv") || v == "corr"
}

// Database-internal ids that say nothing about a separate publication.
const NON_IDENTIFYING_SCHEMES: [&str; 4] = ["arxiv", "corpusid", "mag", "openalex"];

fn self_match_reason(c: &PublicationCandidate) -> Option<String> {
    let venues: Vec<&str> = [c.venue.as_deref(), c.journal.as_deref()]
        .into_iter()
        .flatten()
        .filter(|v| !v.trim().is_empty())
        .collect();
    if !venues.is_empty() && venues.iter().all(|v| mentions_arxiv(v)) {
        return Some(format!("venue identifies arXiv: {}", venues.join(" / ")));
    }
    if let Some(doi) = c.doi.as_ref().filter(|d| d.is_arxiv_issued()) {
        return Some(format!("arXiv-issued DOI {doi}"));
    }
    let only_arxiv = c.arxiv_external_id().is_some()
        && c.doi.is_none()
        && c
            .external_ids
            .keys()
            .all(|k| NON_IDENTIFYING_SCHEMES.contains(&k.as_str()));
    if only_arxiv {
        return Some("only external id is the arXiv id".to_string());
    }
    None
}

fn weak_rejection(
    preprint: &PreprintRecord,
    c: &PublicationCandidate,
) -> Option<(FilterRule, String)> {
    if let Some(reason) = self_match_reason(c) {
        return Some((FilterRule::SelfMatch, reason));
    }
    let has_venue = [c.venue.as_deref(), c.journal.as_deref()]
        .into_iter()
        .flatten()
        .any(|v| !v.trim().is_empty());
    if c.publication_types.is_empty() && !has_venue {
        return Some((
            FilterRule::MissingTypeOrVenue,
            "no publication types and no venue".to_string(),
        ));
    }
    if let (Some(ours), Some(theirs)) = (&preprint.doi, &c.doi) {
        if ours != theirs {
            return Some((
                FilterRule::DoiMismatch,
                format!("preprint DOI {ours} != candidate DOI {theirs}"),
            ));
        }
    }
    None
}

pub fn weak_filter(preprint: &PreprintRecord, candidates: &[PublicationCandidate]) -> FilterOutput {
    let mut out = FilterOutput::default();
    for (i, c) in candidates.iter().enumerate() {
        match weak_rejection(preprint, c) {
            Some((rule, detail)) => out
                .trace
                .push(FilterDecision::rejected(c.source, i, rule, detail)),
            None => {
                out.trace.push(FilterDecision::accepted(
                    c.source,
                    i,
                    "weak rules passed".to_string(),
                ));
                out.accepted.push(c.clone());
            }
        }
    }
    out
}

pub fn strong_filter(
    preprint: &PreprintRecord,
    candidates: &[PublicationCandidate],
    t: &MatchThresholds,
) -> FilterOutput {
    let mut out = FilterOutput::default();
    for (i, c) in candidates.iter().enumerate() {
        let decision = strong_decision(preprint, c, i, t);
        if decision.rule.is_none() {
            out.accepted.push(c.clone());
        }
        out.trace.push(decision);
    }
    out
}

fn strong_decision(
    preprint: &PreprintRecord,
    c: &PublicationCandidate,
    index: usize,
    t: &MatchThresholds,
) -> FilterDecision {
    if let Some((rule, detail)) = weak_rejection(preprint, c) {
        return FilterDecision::rejected(c.source, index, rule, detail);
    }
    let title = match title_match(&preprint.title, &c.title, t) {
        Ok(m) => m,
        Err(e) => {
            return FilterDecision::rejected(c.source, index, FilterRule::TitleDistance, e.to_string())
        }
    };
    if !title.accepted {
        return FilterDecision::rejected(
            c.source,
            index,
            FilterRule::TitleDistance,
            format!("title_ratio={:.4} not < {}", title.ratio, t.title_ratio_max),
        );
    }
    let authors = author_match(&preprint.authors, &c.authors, t);
    if !authors.accepted {
        return FilterDecision::rejected(
            c.source,
            index,
            FilterRule::AuthorRatio,
            format!(
                "title_ratio={:.4} author_ratio={:.4} not > {}",
                title.ratio, authors.ratio, t.author_ratio_min
            ),
        );
    }
    FilterDecision::accepted(
        c.source,
        index,
        format!("title_ratio={:.4} author_ratio={:.4}", title.ratio, authors.ratio),
    )
}

/// Filters every provider result and assembles the report.
///
/// Each result goes through weak filtering when its mode is WEAK and strong
/// filtering otherwise. Trace indices refer to the provider's (deduplicated)
/// candidate list.
pub fn resolve(
    preprint: &PreprintRecord,
    provider_results: &[ProviderResult],
    t: &MatchThresholds,
) -> ResolutionReport {
    let mut per_database: BTreeMap<SourceDatabase, Vec<PublicationCandidate>> =
        SourceDatabase::ALL.iter().map(|&db| (db, Vec::new())).collect();
    let mut trace = Vec::new();

    for result in provider_results {
        let candidates = dedup_candidates(result.candidates.clone());
        let filtered = match result.filter_mode {
            FilterMode::Weak => weak_filter(preprint, &candidates),
            FilterMode::Strong => strong_filter(preprint, &candidates, t),
        };
        let mut accepted = filtered.accepted;
        accepted.sort_by(display_order);
        per_database
            .entry(result.source)
            .or_default()
            .extend(accepted);
        trace.extend(filtered.trace);
    }

    ResolutionReport::new(preprint.clone(), per_database, trace)
}
