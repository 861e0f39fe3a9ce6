//! DBLP publication search: one title query, top five hits.

use std::sync::Arc;

use async_trait::async_trait;
use serde_json::Value;

use super::{encode_plus, non_empty, parse_json, CandidateProvider, CandidateQuery, ProviderError, ProviderResult, Session};
use crate::config::ResolverConfig;
use crate::http::Transport;
use crate::id::normalize_arxiv_input;
use crate::model::{DiscoveryKind, DiscoveryPath, Doi, PersonName, PublicationCandidate, SourceDatabase};

pub struct DblpProvider {
    transport: Arc<dyn Transport>,
    base: String,
    user_agent: String,
}

impl DblpProvider {
    pub fn new(transport: Arc<dyn Transport>, config: &ResolverConfig) -> Self {
        DblpProvider {
            transport,
            base: config.endpoints.dblp.trim_end_matches('/').to_string(),
            user_agent: config.user_agent_header(),
        }
    }

    pub fn search_url(&self, title: &str) -> String {
        format!("{}/search/publ/api?q={}&format=json&h=5", self.base, encode_plus(title))
    }
}

#[async_trait]
impl CandidateProvider for DblpProvider {
    fn source(&self) -> SourceDatabase {
        SourceDatabase::Dblp
    }

    async fn query(&self, q: &CandidateQuery) -> ProviderResult {
        let mut session = Session::new(self.transport.as_ref(), &self.user_agent);
        let url = self.search_url(&q.title);
        let candidates = match session.get(&url, &[]).await {
            Ok(Some(body)) => match parse_search(&body) {
                Ok(c) => c,
                Err(e) => {
                    session.record("search", e);
                    Vec::new()
                }
            },
            Ok(None) => Vec::new(),
            Err(e) => {
                session.record("search", e);
                Vec::new()
            }
        };
        session.finish(SourceDatabase::Dblp, candidates)
    }
}

fn strings(v: Option<&Value>) -> Vec<String> {
    match v {
        Some(Value::String(s)) => vec![s.clone()],
        Some(Value::Array(items)) => items
            .iter()
            .filter_map(|i| i.as_str().map(str::to_string))
            .collect(),
        _ => Vec::new(),
    }
}

// "Wei Wang 0003" carries a homonym number that is not part of the name.
fn clean_author(name: &str) -> String {
    let tokens: Vec<&str> = name.split_whitespace().collect();
    let keep = tokens
        .iter()
        .rposition(|t| !t.chars().all(|c| c.is_ascii_digit()))
        .map_or(tokens.len(), |i| i + 1);
    tokens[..keep].join(" ")
}

fn authors(info: &Value) -> Vec<PersonName> {
    let list = match info.get("authors").and_then(|a| a.get("author")) {
        Some(Value::Array(items)) => items.iter().collect(),
        Some(single) => vec![single],
        None => Vec::new(),
    };
    list.into_iter()
        .filter_map(|a| match a {
            Value::String(s) => Some(s.as_str()),
            other => other.get("text").and_then(Value::as_str),
        })
        .map(|n| PersonName::new(&clean_author(n)))
        .collect()
}

pub(crate) fn parse_search(body: &str) -> Result<Vec<PublicationCandidate>, ProviderError> {
    let root = parse_json(body)?;
    let hits = root
        .get("result")
        .and_then(|r| r.get("hits"))
        .ok_or_else(|| ProviderError::Parse("missing result.hits".into()))?;
    let hits = match hits.get("hit") {
        Some(Value::Array(items)) => items.clone(),
        Some(single @ Value::Object(_)) => vec![single.clone()],
        _ => Vec::new(),
    };

    let mut out = Vec::new();
    for hit in hits {
        let Some(info) = hit.get("info") else { continue };
        let title = info.get("title").and_then(Value::as_str).unwrap_or("");
        // DBLP titles end with a period.
        let title = title.trim().strip_suffix('.').unwrap_or(title.trim());
        if title.is_empty() {
            continue;
        }
        let mut c = PublicationCandidate::new(
            SourceDatabase::Dblp,
            DiscoveryPath::new(DiscoveryKind::TitleSearch, 1),
            title,
        )
        .with_raw_payload(&hit.to_string());
        c.authors = authors(info);
        let venues = strings(info.get("venue"));
        c.venue = (!venues.is_empty()).then(|| venues.join(", "));
        c.year = info
            .get("year")
            .and_then(|y| y.as_str().and_then(|s| s.parse().ok()).or(y.as_i64().map(|n| n as i32)));
        c.publication_types = non_empty(info.get("type").and_then(Value::as_str))
            .into_iter()
            .collect();
        c.doi = info.get("doi").and_then(Value::as_str).and_then(Doi::parse);
        c.volume = non_empty(info.get("volume").and_then(Value::as_str));
        c.number = non_empty(info.get("number").and_then(Value::as_str));
        c.pages = non_empty(info.get("pages").and_then(Value::as_str));
        let ee = strings(info.get("ee"));
        c.url = ee.first().cloned().or_else(|| non_empty(info.get("url").and_then(Value::as_str)));
        if let Some(key) = non_empty(info.get("key").and_then(Value::as_str)) {
            c.external_ids.insert("dblp".into(), key);
        }
        if let Some(doi) = &c.doi {
            c.external_ids.insert("doi".into(), doi.as_str().to_string());
        }
        for link in &ee {
            let lower = link.to_ascii_lowercase();
            if let Some(pos) = lower.find("arxiv.org/abs/") {
                if let Ok(id) = normalize_arxiv_input(&lower[pos..]) {
                    c.external_ids.insert("arxiv".into(), id.normalized().to_string());
                }
            }
        }
        out.push(c);
    }
    Ok(out)
}
