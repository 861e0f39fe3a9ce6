//! arXiv API client and Atom feed parsing.

use std::sync::Arc;
use std::time::Duration;

use chrono::{DateTime, NaiveDate, Utc};
use roxmltree::{Document, Node};
use thiserror::Error;

use crate::config::ResolverConfig;
use crate::http::{HttpRequest, Transport, TransportError};
use crate::id::normalize_arxiv_input;
use crate::model::{collapse_whitespace, ArxivId, Doi, PersonName, PreprintRecord};

const ATOM_NS: &str = "http://www.w3.org/2005/Atom";
const ARXIV_NS: &str = "http://arxiv.org/schemas/atom";
const ERROR_ID_PREFIX: &str = "http://arxiv.org/api/errors";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArxivError {
    #[error("arXiv API unreachable: {0}")]
    Network(String),
    #[error("arXiv has no entry for {0}")]
    NotFound(String),
    #[error("malformed arXiv response: {0}")]
    Parse(String),
    #[error("arXiv API rate limit hit")]
    RateLimited,
}

/// Raw entry blocks of one API response.
#[derive(Debug, Clone, PartialEq)]
pub struct ArxivApiResponse {
    pub entries: Vec<String>,
    pub fetched_at: DateTime<Utc>,
}

impl ArxivApiResponse {
    pub fn parse(xml: &str) -> Result<Self, ArxivError> {
        let doc = Document::parse(xml).map_err(|e| ArxivError::Parse(e.to_string()))?;
        let root = doc.root_element();
        if !is(root, ATOM_NS, "feed") {
            return Err(ArxivError::Parse("root element is not an Atom feed".into()));
        }
        let entries = root
            .children()
            .filter(|n| is(*n, ATOM_NS, "entry"))
            .map(|n| xml[n.range()].to_string())
            .collect();
        Ok(ArxivApiResponse {
            entries,
            fetched_at: Utc::now(),
        })
    }
}

/// A parsed preprint plus anything worth surfacing to the user.
#[derive(Debug, Clone, PartialEq)]
pub struct FetchedPreprint {
    pub record: PreprintRecord,
    pub warnings: Vec<String>,
    pub elapsed: Duration,
}

/// Parses a full feed for the given (queried) id.
pub fn parse_feed(xml: &str, id: &ArxivId) -> Result<(PreprintRecord, Vec<String>), ArxivError> {
    let doc = Document::parse(xml).map_err(|e| ArxivError::Parse(e.to_string()))?;
    let root = doc.root_element();
    if !is(root, ATOM_NS, "feed") {
        return Err(ArxivError::Parse("root element is not an Atom feed".into()));
    }
    let entries: Vec<Node> = root.children().filter(|n| is(*n, ATOM_NS, "entry")).collect();
    let mut warnings = Vec::new();
    let first = match entries.as_slice() {
        [] => return Err(ArxivError::NotFound(id.to_string())),
        [only] => *only,
        [first, ..] => {
            warnings.push(format!(
                "arXiv returned {} entries for {id}; using the first",
                entries.len()
            ));
            *first
        }
    };
    let record = parse_entry(first, id)?;
    Ok((record, warnings))
}

fn parse_entry(entry: Node, queried: &ArxivId) -> Result<PreprintRecord, ArxivError> {
    let entry_id = child_text(entry, ATOM_NS, "id")
        .ok_or_else(|| ArxivError::Parse("entry without id".into()))?;
    if entry_id.starts_with(ERROR_ID_PREFIX) {
        let summary = child_text(entry, ATOM_NS, "summary").unwrap_or_default();
        return Err(ArxivError::NotFound(format!("{queried} ({summary})")));
    }
    let latest_version = normalize_arxiv_input(&entry_id)
        .ok()
        .and_then(|id| id.version())
        .unwrap_or(1);

    let title = child_text(entry, ATOM_NS, "title")
        .ok_or_else(|| ArxivError::Parse("entry without title".into()))?;
    let authors: Vec<PersonName> = entry
        .children()
        .filter(|n| is(*n, ATOM_NS, "author"))
        .filter_map(|a| child_text(a, ATOM_NS, "name"))
        .filter(|name| !name.is_empty())
        .map(|name| PersonName::new(&name))
        .collect();
    if authors.is_empty() {
        return Err(ArxivError::Parse("entry without authors".into()));
    }

    let published_date = date_of(entry, "published")?;
    let updated_date = match child_text(entry, ATOM_NS, "updated") {
        Some(_) => date_of(entry, "updated")?,
        None => published_date,
    };

    let mut categories: Vec<String> = entry
        .children()
        .filter(|n| is(*n, ATOM_NS, "category"))
        .filter_map(|n| n.attribute("term"))
        .map(str::to_string)
        .collect();
    let primary_category = entry
        .children()
        .find(|n| is(*n, ARXIV_NS, "primary_category"))
        .and_then(|n| n.attribute("term"))
        .map(str::to_string)
        .or_else(|| categories.first().cloned())
        .ok_or_else(|| ArxivError::Parse("entry without category".into()))?;
    if !categories.contains(&primary_category) {
        categories.insert(0, primary_category.clone());
    }

    Ok(PreprintRecord {
        id: queried.clone(),
        latest_version,
        title,
        authors,
        doi: child_text(entry, ARXIV_NS, "doi").and_then(|d| Doi::parse(&d)),
        published_date,
        updated_date,
        primary_category,
        categories,
        comment: child_text(entry, ARXIV_NS, "comment").filter(|s| !s.is_empty()),
        journal_ref: child_text(entry, ARXIV_NS, "journal_ref").filter(|s| !s.is_empty()),
        abstract_text: child_text(entry, ATOM_NS, "summary").unwrap_or_default(),
    })
}

fn is(node: Node, ns: &str, name: &str) -> bool {
    node.is_element() && node.tag_name().name() == name && node.tag_name().namespace() == Some(ns)
}

/// Whitespace-collapsed text of the first matching child.
fn child_text(node: Node, ns: &str, name: &str) -> Option<String> {
    node.children().find(|n| is(*n, ns, name)).map(|n| {
        let text: String = n
            .descendants()
            .filter(|d| d.is_text())
            .filter_map(|d| d.text())
            .collect();
        collapse_whitespace(&text)
    })
}

fn date_of(entry: Node, name: &str) -> Result<NaiveDate, ArxivError> {
    let text = child_text(entry, ATOM_NS, name)
        .ok_or_else(|| ArxivError::Parse(format!("entry without {name} date")))?;
    DateTime::parse_from_rfc3339(&text)
        .map(|d| d.date_naive())
        .or_else(|_| NaiveDate::parse_from_str(&text, "%Y-%m-%d"))
        .map_err(|e| ArxivError::Parse(format!("{name} date {text:?}: {e}")))
}

/// Fetches preprint metadata with bounded retries.
pub struct ArxivClient {
    transport: Arc<dyn Transport>,
    base_url: String,
    user_agent: String,
    attempts: u32,
    base_delay: Duration,
}

impl ArxivClient {
    pub fn new(transport: Arc<dyn Transport>, config: &ResolverConfig) -> Self {
        ArxivClient {
            transport,
            base_url: config.endpoints.arxiv.trim_end_matches('/').to_string(),
            user_agent: config.user_agent_header(),
            attempts: config.arxiv_attempts.max(1),
            base_delay: Duration::from_millis(config.retry_base_delay_ms),
        }
    }

    pub fn query_url(&self, id: &ArxivId) -> String {
        format!("{}/api/query?id_list={}", self.base_url, id.normalized())
    }

    /// Queries with the version-free id so the feed describes the latest
    /// version. Transport failures and 5xx responses are retried with
    /// exponential backoff.
    pub async fn fetch_preprint(&self, id: &ArxivId) -> Result<FetchedPreprint, ArxivError> {
        let request = HttpRequest::get(self.query_url(id)).header("User-Agent", &self.user_agent);
        let mut elapsed = Duration::ZERO;
        let mut last_error = ArxivError::Network("no attempt made".into());
        for attempt in 0..self.attempts {
            if attempt > 0 {
                tokio::time::sleep(self.base_delay * 2u32.pow(attempt - 1)).await;
            }
            match self.transport.get(&request).await {
                Ok(response) => {
                    elapsed += response.elapsed;
                    match response.status {
                        200..=299 => {
                            let (record, warnings) = parse_feed(&response.body, id)?;
                            return Ok(FetchedPreprint {
                                record,
                                warnings,
                                elapsed,
                            });
                        }
                        429 | 503 if response.body.to_ascii_lowercase().contains("retry") => {
                            return Err(ArxivError::RateLimited)
                        }
                        429 => return Err(ArxivError::RateLimited),
                        404 => return Err(ArxivError::NotFound(id.to_string())),
                        s if s >= 500 => {
                            last_error = ArxivError::Network(format!("HTTP {s}"));
                        }
                        s => return Err(ArxivError::Network(format!("HTTP {s}"))),
                    }
                }
                Err(TransportError::NoFixture(url)) => {
                    return Err(ArxivError::Network(format!("no fixture recorded for {url}")))
                }
                Err(e) => last_error = ArxivError::Network(e.to_string()),
            }
        }
        Err(last_error)
    }
}
