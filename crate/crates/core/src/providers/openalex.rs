//! OpenAlex: DOI lookup, then title search filtered by arXiv links.

use std::sync::Arc;

use async_trait::async_trait;
use serde_json::Value;

use super::{
    encode_component, non_empty, parse_json, CandidateProvider, CandidateQuery, ProviderError,
    ProviderResult, Session,
};
use crate::config::ResolverConfig;
use crate::http::Transport;
use crate::id::normalize_arxiv_input;
use crate::model::{DiscoveryKind, DiscoveryPath, Doi, PersonName, PublicationCandidate, SourceDatabase};

pub struct OpenAlexProvider {
    transport: Arc<dyn Transport>,
    base: String,
    user_agent: String,
    mailto: Option<String>,
}

impl OpenAlexProvider {
    pub fn new(transport: Arc<dyn Transport>, config: &ResolverConfig) -> Self {
        OpenAlexProvider {
            transport,
            base: config.endpoints.openalex.trim_end_matches('/').to_string(),
            user_agent: config.user_agent_header(),
            mailto: config.mailto.clone(),
        }
    }

    fn mailto_param(&self) -> Option<String> {
        self.mailto
            .as_ref()
            .map(|m| format!("mailto={}", encode_component(m)))
    }

    pub fn doi_url(&self, doi: &Doi) -> String {
        let url = format!("{}/works/doi={}", self.base, doi.as_str());
        match self.mailto_param() {
            Some(m) => format!("{url}?{m}"),
            None => url,
        }
    }

    pub fn search_url(&self, title: &str) -> String {
        let url = format!("{}/works?search={}", self.base, encode_component(title));
        match self.mailto_param() {
            Some(m) => format!("{url}&{m}"),
            None => url,
        }
    }
}

#[async_trait]
impl CandidateProvider for OpenAlexProvider {
    fn source(&self) -> SourceDatabase {
        SourceDatabase::OpenAlex
    }

    async fn query(&self, q: &CandidateQuery) -> ProviderResult {
        let mut session = Session::new(self.transport.as_ref(), &self.user_agent);

        if let Some(doi) = &q.doi {
            match session.get(&self.doi_url(doi), &[]).await {
                Ok(Some(body)) => match parse_work(&body) {
                    Ok(Some(c)) => return session.finish(SourceDatabase::OpenAlex, vec![c]),
                    Ok(None) => {}
                    Err(e) => session.record("doi lookup", e),
                },
                Ok(None) => {}
                Err(e) => session.record("doi lookup", e),
            }
        }

        let works = match session.get(&self.search_url(&q.title), &[]).await {
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
        let candidates = split_by_arxiv_link(works, q.arxiv_id.normalized());
        session.finish(SourceDatabase::OpenAlex, candidates)
    }
}

/// Keeps the works that link the arXiv id (step 2); if none do, returns all
/// of them as title-search hits (step 3).
fn split_by_arxiv_link(works: Vec<(Value, PublicationCandidate)>, id: &str) -> Vec<PublicationCandidate> {
    let linked: Vec<PublicationCandidate> = works
        .iter()
        .filter(|(raw, _)| links_arxiv_id(raw, id))
        .map(|(_, c)| {
            let mut c = c.clone();
            c.discovery = DiscoveryPath::new(DiscoveryKind::DirectArxivId, 2);
            c.external_ids.insert("arxiv".into(), id.to_string());
            c
        })
        .collect();
    if !linked.is_empty() {
        return linked;
    }
    works
        .into_iter()
        .map(|(_, mut c)| {
            c.discovery = DiscoveryPath::new(DiscoveryKind::TitleSearch, 3);
            c
        })
        .collect()
}

fn arxiv_id_in(url: &str) -> Option<String> {
    let lower = url.to_ascii_lowercase();
    let tail = ["arxiv.org/abs/", "arxiv.org/pdf/", "10.48550/arxiv."]
        .iter()
        .find_map(|marker| lower.find(marker).map(|pos| &lower[pos + marker.len()..]))?;
    let tail = tail.split(['?', '#']).next().unwrap_or(tail);
    normalize_arxiv_input(tail).ok().map(|id| id.normalized().to_string())
}

fn collect_strings<'a>(v: &'a Value, out: &mut Vec<&'a str>) {
    match v {
        Value::String(s) => out.push(s),
        Value::Array(items) => items.iter().for_each(|i| collect_strings(i, out)),
        Value::Object(map) => map.values().for_each(|i| collect_strings(i, out)),
        _ => {}
    }
}

/// True when any location URL, id or DOI of the work points at the arXiv id.
pub fn links_arxiv_id(work: &Value, id: &str) -> bool {
    let mut values = Vec::new();
    for key in ["doi", "ids", "primary_location", "best_oa_location", "locations"] {
        if let Some(v) = work.get(key) {
            collect_strings(v, &mut values);
        }
    }
    values
        .into_iter()
        .filter_map(arxiv_id_in)
        .any(|found| found == id)
}

fn work_candidate(work: &Value) -> Option<PublicationCandidate> {
    let title = non_empty(work.get("title").and_then(Value::as_str))
        .or_else(|| non_empty(work.get("display_name").and_then(Value::as_str)))?;
    let mut c = PublicationCandidate::new(
        SourceDatabase::OpenAlex,
        DiscoveryPath::new(DiscoveryKind::DirectDoi, 1),
        &title,
    )
    .with_raw_payload(&work.to_string());
    c.authors = work
        .get("authorships")
        .and_then(Value::as_array)
        .map(|list| {
            list.iter()
                .filter_map(|a| {
                    a.get("author")
                        .and_then(|au| au.get("display_name"))
                        .and_then(Value::as_str)
                        .or_else(|| a.get("raw_author_name").and_then(Value::as_str))
                })
                .map(PersonName::new)
                .collect()
        })
        .unwrap_or_default();
    c.doi = work.get("doi").and_then(Value::as_str).and_then(Doi::parse);
    if let Some(ids) = work.get("ids").and_then(Value::as_object) {
        for (k, v) in ids {
            if let Some(v) = non_empty(v.as_str()) {
                c.external_ids.insert(k.to_ascii_lowercase(), v);
            }
        }
    }
    if let Some(doi) = &c.doi {
        c.external_ids.insert("doi".into(), doi.as_str().to_string());
    }
    let kind = non_empty(work.get("type").and_then(Value::as_str));
    c.publication_types = kind.into_iter().collect();
    if let Some(source) = work.get("primary_location").and_then(|l| l.get("source")).filter(|s| s.is_object()) {
        let name = non_empty(source.get("display_name").and_then(Value::as_str));
        match source.get("type").and_then(Value::as_str) {
            Some("journal") => c.journal = name,
            Some("conference") => {
                c.venue = name;
                c.publication_types.push("conference".into());
            }
            _ => c.venue = name,
        }
        c.publisher = non_empty(source.get("host_organization_name").and_then(Value::as_str));
    }
    c.url = work
        .get("primary_location")
        .and_then(|l| l.get("landing_page_url"))
        .and_then(Value::as_str)
        .and_then(|u| non_empty(Some(u)));
    c.year = work.get("publication_year").and_then(Value::as_i64).map(|y| y as i32);
    c.is_open_access = work
        .get("open_access")
        .and_then(|o| o.get("is_oa"))
        .and_then(Value::as_bool);
    c.citation_count = work.get("cited_by_count").and_then(Value::as_u64);
    if let Some(b) = work.get("biblio") {
        c.volume = non_empty(b.get("volume").and_then(Value::as_str));
        c.number = non_empty(b.get("issue").and_then(Value::as_str));
        let first = non_empty(b.get("first_page").and_then(Value::as_str));
        let last = non_empty(b.get("last_page").and_then(Value::as_str));
        c.pages = match (first, last) {
            (Some(f), Some(l)) if f != l => Some(format!("{f}--{l}")),
            (Some(f), _) => Some(f),
            _ => None,
        };
    }
    Some(c)
}

pub(crate) fn parse_work(body: &str) -> Result<Option<PublicationCandidate>, ProviderError> {
    let work = parse_json(body)?;
    if !work.is_object() {
        return Err(ProviderError::Parse("expected a work object".into()));
    }
    Ok(work_candidate(&work))
}

pub(crate) fn parse_search(body: &str) -> Result<Vec<(Value, PublicationCandidate)>, ProviderError> {
    let root = parse_json(body)?;
    let results = root
        .get("results")
        .and_then(Value::as_array)
        .ok_or_else(|| ProviderError::Parse("missing results".into()))?;
    Ok(results
        .iter()
        .filter_map(|w| work_candidate(w).map(|c| (w.clone(), c)))
        .collect())
}
