//! Semantic Scholar: arXiv id lookup, then DOI lookup, then title search.

use std::sync::Arc;
use std::time::Duration;

use async_trait::async_trait;
use serde_json::Value;

use super::{
    encode_component, non_empty, parse_json, CandidateProvider, CandidateQuery, ProviderError,
    ProviderResult, Session,
};
use crate::config::ResolverConfig;
use crate::http::Transport;
use crate::model::{DiscoveryKind, DiscoveryPath, Doi, PersonName, PublicationCandidate, SourceDatabase};

pub const SEMANTIC_SCHOLAR_FIELDS: &str = "title,authors,journal,venue,year,abstract,publicationTypes,externalIds,isOpenAccess,publicationDate,fieldsOfStudy,s2FieldsOfStudy,referenceCount,citationCount,influentialCitationCount";

pub struct SemanticScholarProvider {
    transport: Arc<dyn Transport>,
    base: String,
    user_agent: String,
    api_key: Option<String>,
    retry_delay: Duration,
}

impl SemanticScholarProvider {
    pub fn new(transport: Arc<dyn Transport>, config: &ResolverConfig) -> Self {
        SemanticScholarProvider {
            transport,
            base: config.endpoints.semantic_scholar.trim_end_matches('/').to_string(),
            user_agent: config.user_agent_header(),
            api_key: config.semantic_scholar_api_key.clone(),
            retry_delay: Duration::from_millis(config.rate_limit_retry_delay_ms),
        }
    }

    pub fn arxiv_url(&self, id: &str) -> String {
        format!("{}/graph/v1/paper/ARXIV:{id}?fields={SEMANTIC_SCHOLAR_FIELDS}", self.base)
    }

    pub fn doi_url(&self, doi: &Doi) -> String {
        format!(
            "{}/graph/v1/paper/DOI:{}?fields={SEMANTIC_SCHOLAR_FIELDS}",
            self.base,
            doi.as_str()
        )
    }

    pub fn search_url(&self, title: &str) -> String {
        format!(
            "{}/graph/v1/paper/search?query={}&limit=10&fields={SEMANTIC_SCHOLAR_FIELDS}",
            self.base,
            encode_component(title)
        )
    }

    // One delayed retry when rate limited.
    async fn get(&self, session: &mut Session<'_>, url: &str) -> Result<Option<String>, ProviderError> {
        match session.get(url, &[]).await {
            Err(ProviderError::RateLimited) => {
                tokio::time::sleep(self.retry_delay).await;
                session.get(url, &[]).await
            }
            other => other,
        }
    }
}

#[async_trait]
impl CandidateProvider for SemanticScholarProvider {
    fn source(&self) -> SourceDatabase {
        SourceDatabase::SemanticScholar
    }

    async fn query(&self, q: &CandidateQuery) -> ProviderResult {
        let mut session = Session::new(self.transport.as_ref(), &self.user_agent);
        if let Some(key) = &self.api_key {
            session = session.with_header("x-api-key", key);
        }
        let id = q.arxiv_id.normalized();

        let step1 = DiscoveryPath::new(DiscoveryKind::DirectArxivId, 1);
        match self.get(&mut session, &self.arxiv_url(id)).await {
            Ok(Some(body)) => match parse_paper(&body, step1) {
                Ok(Some(mut c)) => {
                    c.external_ids.insert("arxiv".into(), id.to_string());
                    return session.finish(SourceDatabase::SemanticScholar, vec![c]);
                }
                Ok(None) => {}
                Err(e) => session.record("arxiv lookup", e),
            },
            Ok(None) => {}
            Err(e) => session.record("arxiv lookup", e),
        }

        if let Some(doi) = &q.doi {
            let step2 = DiscoveryPath::new(DiscoveryKind::DirectDoi, 2);
            match self.get(&mut session, &self.doi_url(doi)).await {
                Ok(Some(body)) => match parse_paper(&body, step2) {
                    Ok(Some(c)) => return session.finish(SourceDatabase::SemanticScholar, vec![c]),
                    Ok(None) => {}
                    Err(e) => session.record("doi lookup", e),
                },
                Ok(None) => {}
                Err(e) => session.record("doi lookup", e),
            }
        }

        let candidates = match self.get(&mut session, &self.search_url(&q.title)).await {
            Ok(Some(body)) => parse_search(&body).unwrap_or_else(|e| {
                session.record("search", e);
                Vec::new()
            }),
            Ok(None) => Vec::new(),
            Err(e) => {
                session.record("search", e);
                Vec::new()
            }
        };
        session.finish(SourceDatabase::SemanticScholar, candidates)
    }
}

fn id_value(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => non_empty(Some(s)),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

pub(crate) fn parse_item(paper: &Value, discovery: DiscoveryPath) -> Option<PublicationCandidate> {
    let title = non_empty(paper.get("title").and_then(Value::as_str))?;
    let mut c = PublicationCandidate::new(SourceDatabase::SemanticScholar, discovery, &title)
        .with_raw_payload(&paper.to_string());
    c.authors = paper
        .get("authors")
        .and_then(Value::as_array)
        .map(|list| {
            list.iter()
                .filter_map(|a| a.get("name").and_then(Value::as_str))
                .map(PersonName::new)
                .collect()
        })
        .unwrap_or_default();
    if let Some(ids) = paper.get("externalIds").and_then(Value::as_object) {
        for (k, v) in ids {
            if let Some(v) = id_value(v) {
                c.external_ids.insert(k.to_ascii_lowercase(), v);
            }
        }
    }
    c.doi = c.external_ids.get("doi").and_then(|d| Doi::parse(d));
    c.venue = non_empty(paper.get("venue").and_then(Value::as_str));
    if let Some(journal) = paper.get("journal").filter(|j| j.is_object()) {
        c.journal = non_empty(journal.get("name").and_then(Value::as_str));
        c.volume = non_empty(journal.get("volume").and_then(Value::as_str));
        c.pages = non_empty(journal.get("pages").and_then(Value::as_str));
    }
    c.year = paper.get("year").and_then(Value::as_i64).map(|y| y as i32);
    c.publication_types = paper
        .get("publicationTypes")
        .and_then(Value::as_array)
        .map(|t| t.iter().filter_map(|s| non_empty(s.as_str())).collect())
        .unwrap_or_default();
    c.is_open_access = paper.get("isOpenAccess").and_then(Value::as_bool);
    c.citation_count = paper.get("citationCount").and_then(Value::as_u64);
    c.url = non_empty(paper.get("url").and_then(Value::as_str));
    Some(c)
}

pub(crate) fn parse_paper(
    body: &str,
    discovery: DiscoveryPath,
) -> Result<Option<PublicationCandidate>, ProviderError> {
    let paper = parse_json(body)?;
    if !paper.is_object() {
        return Err(ProviderError::Parse("expected a paper object".into()));
    }
    Ok(parse_item(&paper, discovery))
}

pub(crate) fn parse_search(body: &str) -> Result<Vec<PublicationCandidate>, ProviderError> {
    let root = parse_json(body)?;
    if !root.is_object() {
        return Err(ProviderError::Parse("expected a search object".into()));
    }
    let Some(data) = root.get("data").and_then(Value::as_array) else {
        // A search without matches omits "data".
        return Ok(Vec::new());
    };
    Ok(data
        .iter()
        .take(10)
        .filter_map(|p| parse_item(p, DiscoveryPath::new(DiscoveryKind::TitleSearch, 3)))
        .collect())
}
