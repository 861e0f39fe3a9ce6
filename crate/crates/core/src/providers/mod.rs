//! Literature-database providers.
//!
//! Each provider runs its own query cascade and reports every hit as a
//! [`PublicationCandidate`]. A provider failure never aborts a resolution: it
//! yields an empty [`ProviderResult`] carrying the error text.

mod crossref;
mod dblp;
mod openalex;
mod semantic_scholar;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use std::time::Duration;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};

pub use crossref::CrossrefProvider;
pub use dblp::DblpProvider;
pub use openalex::{links_arxiv_id, OpenAlexProvider};
pub use semantic_scholar::{SemanticScholarProvider, SEMANTIC_SCHOLAR_FIELDS};

use crate::config::ResolverConfig;
use crate::http::{HttpRequest, Transport, TransportError};
use crate::model::{
    dedup_candidates, ArxivId, Doi, FilterMode, PreprintRecord, PublicationCandidate,
    SourceDatabase,
};

/// What the providers search with: the preprint's id, title and DOI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateQuery {
    pub arxiv_id: ArxivId,
    pub title: String,
    pub doi: Option<Doi>,
}

impl CandidateQuery {
    pub fn from_preprint(p: &PreprintRecord) -> Self {
        CandidateQuery {
            arxiv_id: p.id.clone(),
            title: p.title.clone(),
            doi: p.doi.clone(),
        }
    }
}

/// Candidates from one database.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderResult {
    pub source: SourceDatabase,
    pub candidates: Vec<PublicationCandidate>,
    /// WEAK when every candidate was linked to the arXiv id by the database.
    pub filter_mode: FilterMode,
    pub errors_encountered: Vec<String>,
    /// Milliseconds spent in upstream requests.
    pub elapsed_ms: u64,
}

impl ProviderResult {
    pub fn new(
        source: SourceDatabase,
        candidates: Vec<PublicationCandidate>,
        errors_encountered: Vec<String>,
    ) -> Self {
        let candidates = dedup_candidates(candidates);
        let filter_mode = if !candidates.is_empty()
            && candidates.iter().all(|c| c.discovery.is_direct_arxiv())
        {
            FilterMode::Weak
        } else {
            FilterMode::Strong
        };
        ProviderResult {
            source,
            candidates,
            filter_mode,
            errors_encountered,
            elapsed_ms: 0,
        }
    }

    pub fn failed(source: SourceDatabase, error: impl Into<String>) -> Self {
        ProviderResult::new(source, Vec::new(), vec![error.into()])
    }

    pub fn with_elapsed(mut self, elapsed: Duration) -> Self {
        self.elapsed_ms = elapsed.as_millis() as u64;
        self
    }
}

#[async_trait]
pub trait CandidateProvider: Send + Sync {
    fn source(&self) -> SourceDatabase;
    async fn query(&self, q: &CandidateQuery) -> ProviderResult;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum ProviderError {
    Network(String),
    RateLimited,
    Http(u16),
    Parse(String),
    /// A previous step could not reach the database; nothing was sent.
    Skipped,
}

impl fmt::Display for ProviderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProviderError::Network(e) => write!(f, "network error: {e}"),
            ProviderError::RateLimited => f.write_str("rate limited (HTTP 429)"),
            ProviderError::Http(status) => write!(f, "HTTP {status}"),
            ProviderError::Parse(e) => write!(f, "unparseable response: {e}"),
            ProviderError::Skipped => f.write_str("skipped, database unreachable"),
        }
    }
}

/// Shared state of one provider run: request headers, accumulated upstream
/// time, and errors collected across cascade steps. After a network failure
/// the remaining steps send nothing.
pub(crate) struct Session<'a> {
    transport: &'a dyn Transport,
    headers: Vec<(String, String)>,
    unreachable: bool,
    pub elapsed: Duration,
    pub errors: Vec<String>,
}

impl<'a> Session<'a> {
    pub fn new(transport: &'a dyn Transport, user_agent: &str) -> Self {
        Session {
            transport,
            headers: vec![("User-Agent".to_string(), user_agent.to_string())],
            unreachable: false,
            elapsed: Duration::ZERO,
            errors: Vec::new(),
        }
    }

    pub fn with_header(mut self, name: &str, value: &str) -> Self {
        self.headers.push((name.to_string(), value.to_string()));
        self
    }

    /// GET returning the body of a 2xx response, `None` for 404.
    pub async fn get(
        &mut self,
        url: &str,
        extra_headers: &[(&str, &str)],
    ) -> Result<Option<String>, ProviderError> {
        if self.unreachable {
            return Err(ProviderError::Skipped);
        }
        let mut request = HttpRequest::get(url);
        request.headers = self.headers.clone();
        for (name, value) in extra_headers {
            request = request.header(name, *value);
        }
        let response = self.transport.get(&request).await.map_err(|e| {
            self.unreachable = true;
            match e {
                TransportError::Network(m) => ProviderError::Network(m),
                other => ProviderError::Network(other.to_string()),
            }
        })?;
        self.elapsed += response.elapsed;
        match response.status {
            200..=299 => Ok(Some(response.body)),
            404 => Ok(None),
            429 => Err(ProviderError::RateLimited),
            status => Err(ProviderError::Http(status)),
        }
    }

    pub fn record(&mut self, step: &str, error: ProviderError) {
        if error == ProviderError::Skipped {
            return;
        }
        self.errors.push(format!("{step}: {error}"));
    }

    pub fn finish(self, source: SourceDatabase, candidates: Vec<PublicationCandidate>) -> ProviderResult {
        ProviderResult::new(source, candidates, self.errors).with_elapsed(self.elapsed)
    }
}

pub(crate) fn parse_json(body: &str) -> Result<serde_json::Value, ProviderError> {
    serde_json::from_str(body).map_err(|e| ProviderError::Parse(e.to_string()))
}

/// Percent-encodes everything but unreserved characters.
pub(crate) fn encode_component(s: &str) -> String {
    urlencoding::encode(s).into_owned()
}

/// Form-style encoding: spaces become `+`.
pub(crate) fn encode_plus(s: &str) -> String {
    urlencoding::encode(s).replace("%20", "+")
}

/// Year from CSL-style `{"date-parts": [[2020, 1, 2]]}`.
pub(crate) fn year_from_date_parts(v: &serde_json::Value) -> Option<i32> {
    v.get("date-parts")?
        .get(0)?
        .get(0)
        .and_then(|y| y.as_i64().or_else(|| y.as_str().and_then(|s| s.parse().ok())))
        .map(|y| y as i32)
}

pub(crate) fn non_empty(s: Option<&str>) -> Option<String> {
    s.map(str::trim).filter(|s| !s.is_empty()).map(str::to_string)
}

/// The four providers, queried concurrently.
pub struct Providers {
    providers: Vec<Arc<dyn CandidateProvider>>,
    enabled: BTreeSet<SourceDatabase>,
    timeout: Duration,
}

impl Providers {
    pub fn new(transport: Arc<dyn Transport>, config: &ResolverConfig) -> Self {
        let providers: Vec<Arc<dyn CandidateProvider>> = vec![
            Arc::new(DblpProvider::new(transport.clone(), config)),
            Arc::new(CrossrefProvider::new(transport.clone(), config)),
            Arc::new(SemanticScholarProvider::new(transport.clone(), config)),
            Arc::new(OpenAlexProvider::new(transport, config)),
        ];
        Providers::from_providers(providers, config)
    }

    /// Uses the given providers; results still come back in the fixed
    /// database order.
    pub fn from_providers(
        mut providers: Vec<Arc<dyn CandidateProvider>>,
        config: &ResolverConfig,
    ) -> Self {
        providers.sort_by_key(|p| p.source());
        Providers {
            providers,
            enabled: config.databases.iter().copied().collect(),
            timeout: config.provider_timeout(),
        }
    }

    pub fn set_enabled(&mut self, databases: &[SourceDatabase]) {
        self.enabled = databases.iter().copied().collect();
    }

    /// Runs all providers and returns exactly four results in the fixed
    /// database order. Disabled databases yield empty, error-free results.
    pub async fn query_all(&self, q: &CandidateQuery) -> Vec<ProviderResult> {
        self.query_all_within(q, self.timeout).await
    }

    /// Like [`Providers::query_all`] with the per-provider timeout capped.
    pub async fn query_all_within(&self, q: &CandidateQuery, limit: Duration) -> Vec<ProviderResult> {
        let timeout = self.timeout.min(limit);
        let runs = SourceDatabase::ALL.iter().map(|&db| async move {
            let provider = self.providers.iter().find(|p| p.source() == db);
            match provider {
                Some(p) if self.enabled.contains(&db) => {
                    match tokio::time::timeout(timeout, p.query(q)).await {
                        Ok(result) => result,
                        Err(_) => ProviderResult::failed(
                            db,
                            format!("timed out after {} ms", timeout.as_millis()),
                        )
                        .with_elapsed(timeout),
                    }
                }
                Some(_) => ProviderResult::new(db, Vec::new(), Vec::new()),
                None => ProviderResult::failed(db, "no provider configured"),
            }
        });
        futures::future::join_all(runs).await
    }
}
