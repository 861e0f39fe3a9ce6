//! Domain types shared by every stage of the resolution pipeline.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use chrono::NaiveDate;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::id::{normalize_arxiv_input, IdError};
use crate::matcher::names;

/// Upper bound on the verbatim response fragment kept on each candidate.
pub const RAW_PAYLOAD_LIMIT: usize = 16 * 1024;

/// A normalized arXiv identifier.
///
/// `normalized` is lowercase, trimmed and free of the `arxiv:`, `abs/` and
/// `pdf/` prefixes and of a trailing `.pdf`. A trailing `vN` is split off into
/// `version`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArxivId {
    pub(crate) raw: String,
    pub(crate) normalized: String,
    pub(crate) version: Option<u32>,
}

impl ArxivId {
    pub fn parse(raw: &str) -> Result<Self, IdError> {
        normalize_arxiv_input(raw)
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn normalized(&self) -> &str {
        &self.normalized
    }

    pub fn version(&self) -> Option<u32> {
        self.version
    }

    pub fn as_str(&self) -> &str {
        &self.normalized
    }
}

impl fmt::Display for ArxivId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.normalized)
    }
}

/// A DOI in canonical `10.x/...` form. Equality and hashing ignore case.
#[derive(Debug, Clone)]
pub struct Doi(String);

impl Doi {
    /// Accepts bare DOIs as well as `doi:` and `https://doi.org/` forms.
    pub fn parse(input: &str) -> Option<Self> {
        let mut s = input.trim();
        for prefix in [
            "https://doi.org/",
            "http://doi.org/",
            "https://dx.doi.org/",
            "http://dx.doi.org/",
            "doi.org/",
            "doi:",
        ] {
            if s.len() >= prefix.len() && s[..prefix.len()].eq_ignore_ascii_case(prefix) {
                s = s[prefix.len()..].trim_start();
                break;
            }
        }
        if s.starts_with("10.") && s.contains('/') && !s.ends_with('/') {
            Some(Doi(s.to_string()))
        } else {
            None
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// DOIs minted by arXiv (DataCite prefix 10.48550) identify the preprint itself.
    pub fn is_arxiv_issued(&self) -> bool {
        self.0.starts_with("10.48550/")
    }
}

impl PartialEq for Doi {
    fn eq(&self, other: &Self) -> bool {
        self.0.eq_ignore_ascii_case(&other.0)
    }
}

impl Eq for Doi {}

impl Hash for Doi {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_ascii_lowercase().hash(state);
    }
}

impl fmt::Display for Doi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Doi {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Doi {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Doi::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("invalid DOI: {s}")))
    }
}

/// An author name with its extracted and folded family name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonName {
    pub full: String,
    pub surname: String,
    pub folded_surname: String,
}

impl PersonName {
    /// Builds a name from a single display string ("Ann Lee", "Lee, Ann").
    pub fn new(full: &str) -> Self {
        let full = collapse_whitespace(full);
        let surname = names::extract_surname(&full);
        let folded_surname = names::fold(&surname);
        PersonName {
            full,
            surname,
            folded_surname,
        }
    }

    /// Builds a name from separate given and family parts, as CrossRef and
    /// CSL-JSON deliver them.
    pub fn from_parts(given: Option<&str>, family: &str) -> Self {
        let family = collapse_whitespace(family);
        let full = match given.map(collapse_whitespace).filter(|g| !g.is_empty()) {
            Some(g) if !family.is_empty() => format!("{g} {family}"),
            Some(g) => g,
            None => family.clone(),
        };
        if family.is_empty() {
            return PersonName::new(&full);
        }
        let surname = names::surname_from_family(&family);
        let folded_surname = names::fold(&surname);
        PersonName {
            full,
            surname,
            folded_surname,
        }
    }
}

/// Preprint metadata extracted from the arXiv API.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprintRecord {
    pub id: ArxivId,
    pub latest_version: u32,
    pub title: String,
    pub authors: Vec<PersonName>,
    pub doi: Option<Doi>,
    pub published_date: NaiveDate,
    pub updated_date: NaiveDate,
    pub primary_category: String,
    pub categories: Vec<String>,
    pub comment: Option<String>,
    pub journal_ref: Option<String>,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
}

/// The four literature databases, in their fixed reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SourceDatabase {
    #[serde(rename = "DBLP")]
    Dblp,
    #[serde(rename = "CROSSREF_CROSSCITE")]
    CrossrefCrosscite,
    #[serde(rename = "SEMANTIC_SCHOLAR")]
    SemanticScholar,
    #[serde(rename = "OPENALEX")]
    OpenAlex,
}

impl SourceDatabase {
    pub const ALL: [SourceDatabase; 4] = [
        SourceDatabase::Dblp,
        SourceDatabase::CrossrefCrosscite,
        SourceDatabase::SemanticScholar,
        SourceDatabase::OpenAlex,
    ];

    /// Wire name, as used in JSON and CSV output.
    pub fn as_str(self) -> &'static str {
        match self {
            SourceDatabase::Dblp => "DBLP",
            SourceDatabase::CrossrefCrosscite => "CROSSREF_CROSSCITE",
            SourceDatabase::SemanticScholar => "SEMANTIC_SCHOLAR",
            SourceDatabase::OpenAlex => "OPENALEX",
        }
    }

    /// Position in the fixed order; also the bit index in Venn masks.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Parses wire names and the short names accepted on the command line.
    pub fn from_name(name: &str) -> Option<Self> {
        let key: String = name
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "dblp" => Some(SourceDatabase::Dblp),
            "crossref" | "crosscite" | "crossrefcrosscite" => {
                Some(SourceDatabase::CrossrefCrosscite)
            }
            "semanticscholar" | "s2" | "ss" => Some(SourceDatabase::SemanticScholar),
            "openalex" | "oa" => Some(SourceDatabase::OpenAlex),
            _ => None,
        }
    }
}

impl fmt::Display for SourceDatabase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiscoveryKind {
    DirectArxivId,
    DirectDoi,
    TitleSearch,
}

/// How a candidate was found, and at which cascade step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiscoveryPath {
    pub kind: DiscoveryKind,
    pub cascade_step: u8,
}

impl DiscoveryPath {
    pub fn new(kind: DiscoveryKind, cascade_step: u8) -> Self {
        DiscoveryPath { kind, cascade_step }
    }

    pub fn is_direct_arxiv(&self) -> bool {
        self.kind == DiscoveryKind::DirectArxivId
    }
}

/// One hit from a literature database.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicationCandidate {
    pub source: SourceDatabase,
    pub discovery: DiscoveryPath,
    pub title: String,
    pub authors: Vec<PersonName>,
    pub doi: Option<Doi>,
    pub venue: Option<String>,
    pub journal: Option<String>,
    pub year: Option<i32>,
    pub publication_types: Vec<String>,
    /// Scheme (lowercase, e.g. `arxiv`, `doi`, `dblp`) to identifier.
    pub external_ids: BTreeMap<String, String>,
    pub is_open_access: Option<bool>,
    pub citation_count: Option<u64>,
    pub volume: Option<String>,
    pub number: Option<String>,
    pub pages: Option<String>,
    pub publisher: Option<String>,
    pub url: Option<String>,
    pub raw_payload: String,
}

impl PublicationCandidate {
    pub fn new(source: SourceDatabase, discovery: DiscoveryPath, title: &str) -> Self {
        PublicationCandidate {
            source,
            discovery,
            title: collapse_whitespace(title),
            authors: Vec::new(),
            doi: None,
            venue: None,
            journal: None,
            year: None,
            publication_types: Vec::new(),
            external_ids: BTreeMap::new(),
            is_open_access: None,
            citation_count: None,
            volume: None,
            number: None,
            pages: None,
            publisher: None,
            url: None,
            raw_payload: String::new(),
        }
    }

    /// Stores the response fragment, truncated to [`RAW_PAYLOAD_LIMIT`] bytes.
    pub fn with_raw_payload(mut self, payload: &str) -> Self {
        self.raw_payload = truncate_on_char_boundary(payload, RAW_PAYLOAD_LIMIT).to_string();
        self
    }

    pub fn arxiv_external_id(&self) -> Option<&str> {
        self.external_ids.get("arxiv").map(String::as_str)
    }

    fn dedup_key(&self) -> DedupKey {
        match &self.doi {
            Some(doi) => DedupKey::Doi(doi.as_str().to_ascii_lowercase()),
            None => DedupKey::TitleYear(names::fold_diacritics(&self.title), self.year),
        }
    }
}

#[derive(PartialEq, Eq, Hash)]
enum DedupKey {
    Doi(String),
    TitleYear(String, Option<i32>),
}

/// Keeps the first occurrence of each candidate within one database, keyed by
/// DOI or, lacking one, by folded title and year.
pub fn dedup_candidates(candidates: Vec<PublicationCandidate>) -> Vec<PublicationCandidate> {
    let mut seen = HashSet::new();
    candidates
        .into_iter()
        .filter(|c| seen.insert(c.dedup_key()))
        .collect()
}

/// Display order inside one database: most cited first, then by title.
pub fn display_order(a: &PublicationCandidate, b: &PublicationCandidate) -> Ordering {
    b.citation_count
        .unwrap_or(0)
        .cmp(&a.citation_count.unwrap_or(0))
        .then_with(|| a.title.cmp(&b.title))
}

/// Which rule set a provider's candidates go through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FilterMode {
    Weak,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FilterOutcome {
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FilterRule {
    SelfMatch,
    MissingTypeOrVenue,
    DoiMismatch,
    TitleDistance,
    AuthorRatio,
}

impl FilterRule {
    /// Whether the rule belongs to the weak rule set.
    pub fn is_weak(self) -> bool {
        matches!(
            self,
            FilterRule::SelfMatch | FilterRule::MissingTypeOrVenue | FilterRule::DoiMismatch
        )
    }
}

/// Why one candidate was kept or dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterDecision {
    pub source: SourceDatabase,
    /// Index into the candidate list of that database's provider result.
    pub candidate_index: usize,
    pub outcome: FilterOutcome,
    /// Set exactly when `outcome` is `REJECTED`.
    pub rule: Option<FilterRule>,
    pub detail: String,
}

impl FilterDecision {
    pub fn accepted(source: SourceDatabase, candidate_index: usize, detail: String) -> Self {
        FilterDecision {
            source,
            candidate_index,
            outcome: FilterOutcome::Accepted,
            rule: None,
            detail,
        }
    }

    pub fn rejected(
        source: SourceDatabase,
        candidate_index: usize,
        rule: FilterRule,
        detail: String,
    ) -> Self {
        FilterDecision {
            source,
            candidate_index,
            outcome: FilterOutcome::Rejected,
            rule: Some(rule),
            detail,
        }
    }
}

/// Outcome of filtering every provider's candidates for one preprint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub preprint: PreprintRecord,
    pub per_database: BTreeMap<SourceDatabase, Vec<PublicationCandidate>>,
    pub trace: Vec<FilterDecision>,
    pub resolved: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ResolutionReport {
    /// Assembles a report; `resolved` is derived from the lists.
    pub fn new(
        preprint: PreprintRecord,
        per_database: BTreeMap<SourceDatabase, Vec<PublicationCandidate>>,
        trace: Vec<FilterDecision>,
    ) -> Self {
        let resolved = per_database.values().any(|list| !list.is_empty());
        ResolutionReport {
            preprint,
            per_database,
            trace,
            resolved,
            warnings: Vec::new(),
        }
    }

    /// Databases that contributed at least one accepted candidate.
    pub fn resolving_databases(&self) -> Vec<SourceDatabase> {
        self.per_database
            .iter()
            .filter(|(_, list)| !list.is_empty())
            .map(|(db, _)| *db)
            .collect()
    }

    pub fn accepted(&self) -> impl Iterator<Item = &PublicationCandidate> {
        self.per_database.values().flatten()
    }
}

pub fn is_resolved(report: &ResolutionReport) -> bool {
    report.per_database.values().any(|list| !list.is_empty())
}

pub(crate) fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub(crate) fn truncate_on_char_boundary(s: &str, max: usize) -> &str {
    if s.len() <= max {
        return s;
    }
    let mut end = max;
    while !s.is_char_boundary(end) {
        end -= 1;
    }
    &s[..end]
}
