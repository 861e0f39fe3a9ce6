//! CrossCite DOI content negotiation, then CrossRef bibliographic search.

use std::sync::Arc;

use async_trait::async_trait;
use serde_json::Value;

use super::{
    encode_component, non_empty, parse_json, year_from_date_parts, CandidateProvider,
    CandidateQuery, ProviderError, ProviderResult, Session,
};
use crate::config::ResolverConfig;
use crate::http::Transport;
use crate::model::{DiscoveryKind, DiscoveryPath, Doi, PersonName, PublicationCandidate, SourceDatabase};

pub const CSL_JSON: &str = "application/vnd.citationstyles.csl+json";

pub struct CrossrefProvider {
    transport: Arc<dyn Transport>,
    doi_base: String,
    crossref_base: String,
    user_agent: String,
}

impl CrossrefProvider {
    pub fn new(transport: Arc<dyn Transport>, config: &ResolverConfig) -> Self {
        CrossrefProvider {
            transport,
            doi_base: config.endpoints.doi.trim_end_matches('/').to_string(),
            crossref_base: config.endpoints.crossref.trim_end_matches('/').to_string(),
            user_agent: config.user_agent_header(),
        }
    }

    pub fn crosscite_url(&self, doi: &Doi) -> String {
        format!("{}/{}", self.doi_base, doi.as_str())
    }

    pub fn search_url(&self, title: &str) -> String {
        format!(
            "{}/works?query.bibliographic={}&sort=score&rows=10",
            self.crossref_base,
            encode_component(title)
        )
    }
}

#[async_trait]
impl CandidateProvider for CrossrefProvider {
    fn source(&self) -> SourceDatabase {
        SourceDatabase::CrossrefCrosscite
    }

    async fn query(&self, q: &CandidateQuery) -> ProviderResult {
        let mut session = Session::new(self.transport.as_ref(), &self.user_agent);

        if let Some(doi) = &q.doi {
            let url = self.crosscite_url(doi);
            match session.get(&url, &[("Accept", CSL_JSON)]).await {
                Ok(Some(body)) => match parse_crosscite(&body) {
                    Ok(Some(c)) => return session.finish(SourceDatabase::CrossrefCrosscite, vec![c]),
                    Ok(None) => {}
                    Err(e) => session.record("crosscite", e),
                },
                Ok(None) => {}
                Err(e) => session.record("crosscite", e),
            }
        }

        let url = self.search_url(&q.title);
        let candidates = match session.get(&url, &[]).await {
            Ok(Some(body)) => parse_search(&body).unwrap_or_else(|e| {
                session.record("crossref search", e);
                Vec::new()
            }),
            Ok(None) => Vec::new(),
            Err(e) => {
                session.record("crossref search", e);
                Vec::new()
            }
        };
        session.finish(SourceDatabase::CrossrefCrosscite, candidates)
    }
}

fn first_string(v: Option<&Value>) -> Option<String> {
    match v? {
        Value::String(s) => non_empty(Some(s)),
        Value::Array(items) => items.iter().find_map(|i| non_empty(i.as_str())),
        _ => None,
    }
}

fn csl_authors(item: &Value) -> Vec<PersonName> {
    let Some(list) = item.get("author").and_then(Value::as_array) else {
        return Vec::new();
    };
    list.iter()
        .filter_map(|a| {
            let given = a.get("given").and_then(Value::as_str);
            match a.get("family").and_then(Value::as_str) {
                Some(family) if !family.trim().is_empty() => Some(PersonName::from_parts(given, family)),
                _ => a
                    .get("literal")
                    .or_else(|| a.get("name"))
                    .and_then(Value::as_str)
                    .or(given)
                    .map(PersonName::new),
            }
        })
        .collect()
}

fn is_journal_type(kind: &str) -> bool {
    kind.contains("journal")
}

/// Parses a CSL-JSON record (CrossCite) or a CrossRef work item. Returns
/// `None` when the record has no title.
pub(crate) fn parse_item(item: &Value, discovery: DiscoveryPath) -> Option<PublicationCandidate> {
    let title = first_string(item.get("title"))?;
    let mut c = PublicationCandidate::new(SourceDatabase::CrossrefCrosscite, discovery, &title)
        .with_raw_payload(&item.to_string());
    c.authors = csl_authors(item);
    c.doi = item
        .get("DOI")
        .or_else(|| item.get("doi"))
        .and_then(Value::as_str)
        .and_then(Doi::parse);
    if let Some(doi) = &c.doi {
        c.external_ids.insert("doi".into(), doi.as_str().to_string());
    }
    let kind = non_empty(item.get("type").and_then(Value::as_str));
    let container = first_string(item.get("container-title"));
    match (&kind, container) {
        (Some(k), Some(ct)) if is_journal_type(k) => c.journal = Some(ct),
        (_, Some(ct)) => c.venue = Some(ct),
        _ => {}
    }
    c.publication_types = kind.into_iter().collect();
    c.year = ["issued", "published", "published-print", "published-online", "created"]
        .iter()
        .find_map(|k| item.get(*k).and_then(year_from_date_parts));
    c.publisher = non_empty(item.get("publisher").and_then(Value::as_str));
    c.volume = first_string(item.get("volume"));
    c.number = first_string(item.get("issue"));
    c.pages = first_string(item.get("page"));
    c.url = non_empty(item.get("URL").and_then(Value::as_str));
    c.citation_count = item.get("is-referenced-by-count").and_then(Value::as_u64);
    Some(c)
}

pub(crate) fn parse_crosscite(body: &str) -> Result<Option<PublicationCandidate>, ProviderError> {
    let item = parse_json(body)?;
    if !item.is_object() {
        return Err(ProviderError::Parse("expected a CSL-JSON object".into()));
    }
    Ok(parse_item(&item, DiscoveryPath::new(DiscoveryKind::DirectDoi, 1)))
}

pub(crate) fn parse_search(body: &str) -> Result<Vec<PublicationCandidate>, ProviderError> {
    let root = parse_json(body)?;
    let items = root
        .get("message")
        .and_then(|m| m.get("items"))
        .and_then(Value::as_array)
        .ok_or_else(|| ProviderError::Parse("missing message.items".into()))?;
    Ok(items
        .iter()
        .take(10)
        .filter_map(|i| parse_item(i, DiscoveryPath::new(DiscoveryKind::TitleSearch, 2)))
        .collect())
}
