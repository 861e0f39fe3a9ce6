//! Hand-declared cascade cases: query, expected request log, expected hits.

use std::sync::Arc;

use arxres_core::http::{ReplayTransport, Transport};
use arxres_core::providers::{
    CandidateProvider, CrossrefProvider, DblpProvider, OpenAlexProvider, SemanticScholarProvider,
};
use arxres_core::{ArxivId, CandidateQuery, DiscoveryKind, Doi, ProviderResult, ResolverConfig};

use super::{fixtures_dir, runtime};

const FIELDS: &str = "title,authors,journal,venue,year,abstract,publicationTypes,externalIds,\
isOpenAccess,publicationDate,fieldsOfStudy,s2FieldsOfStudy,referenceCount,citationCount,\
influentialCitationCount";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Dblp,
    Crossref,
    SemanticScholar,
    OpenAlex,
}

pub struct Case {
    pub dir: &'static str,
    pub kind: Kind,
    pub id: &'static str,
    pub title: &'static str,
    pub doi: Option<&'static str>,
    pub urls: Vec<String>,
    pub candidates: usize,
    pub errors: usize,
    pub discovery: Option<(DiscoveryKind, u8)>,
}

fn s2(path: &str) -> String {
    format!("https://api.semanticscholar.org/graph/v1/paper/{path}fields={FIELDS}")
}

fn dblp(q: &str) -> String {
    format!("https://dblp.org/search/publ/api?q={q}&format=json&h=5")
}

fn crossref(q: &str) -> String {
    format!("https://api.crossref.org/works?query.bibliographic={q}&sort=score&rows=10")
}

fn openalex(q: &str) -> String {
    format!("https://api.openalex.org/works?search={q}")
}

pub fn cases() -> Vec<Case> {
    use DiscoveryKind::*;
    use Kind::*;
    let case = |dir, kind, id, title, doi, urls: Vec<String>, candidates, errors, discovery| Case {
        dir,
        kind,
        id,
        title,
        doi,
        urls,
        candidates,
        errors,
        discovery,
    };
    vec![
        case("c01_dblp_five_hits", Dblp, "2102.00001", "Cascade Probe Title", None,
            vec![dblp("Cascade+Probe+Title")], 5, 0, Some((TitleSearch, 1))),
        case("c02_dblp_no_hits", Dblp, "2102.00002", "Cascade Probe Title Empty", None,
            vec![dblp("Cascade+Probe+Title+Empty")], 0, 0, None),
        case("c03_dblp_malformed", Dblp, "2102.00003", "Cascade Probe Title Broken", None,
            vec![dblp("Cascade+Probe+Title+Broken")], 0, 1, None),
        case("c04_crosscite_hit", Crossref, "2102.00004", "Cascade Probe Title", Some("10.5555/cascade"),
            vec!["https://doi.org/10.5555/cascade".into()], 1, 0, Some((DirectDoi, 1))),
        case("c05_crosscite_404_search", Crossref, "2102.00005", "Cascade Probe Title Fallback",
            Some("10.5555/cascade404"),
            vec!["https://doi.org/10.5555/cascade404".into(), crossref("Cascade%20Probe%20Title%20Fallback")],
            1, 0, Some((TitleSearch, 2))),
        case("c06_crossref_ten", Crossref, "2102.00006", "Cascade Probe Title Ten", None,
            vec![crossref("Cascade%20Probe%20Title%20Ten")], 10, 0, Some((TitleSearch, 2))),
        case("c07_crosscite_malformed", Crossref, "2102.00007", "Cascade Probe Title After Error",
            Some("10.5555/cascadebad"),
            vec!["https://doi.org/10.5555/cascadebad".into(), crossref("Cascade%20Probe%20Title%20After%20Error")],
            0, 1, None),
        case("c08_s2_arxiv_hit", SemanticScholar, "2102.00001", "Cascade Probe Title", None,
            vec![s2("ARXIV:2102.00001?")], 1, 0, Some((DirectArxivId, 1))),
        case("c09_s2_doi_hit", SemanticScholar, "2102.00009", "Cascade Probe Title", Some("10.5555/cascades2"),
            vec![s2("ARXIV:2102.00009?"), s2("DOI:10.5555/cascades2?")], 1, 0, Some((DirectDoi, 2))),
        case("c10_s2_all_empty", SemanticScholar, "2102.00010", "Cascade Probe Title Nothing",
            Some("10.5555/cascadenone"),
            vec![
                s2("ARXIV:2102.00010?"),
                s2("DOI:10.5555/cascadenone?"),
                s2("search?query=Cascade%20Probe%20Title%20Nothing&limit=10&"),
            ],
            0, 0, None),
        case("c11_s2_search", SemanticScholar, "2102.00011", "Cascade Probe Title Searched", None,
            vec![s2("ARXIV:2102.00011?"), s2("search?query=Cascade%20Probe%20Title%20Searched&limit=10&")],
            2, 0, Some((TitleSearch, 3))),
        case("c12_s2_rate_limited", SemanticScholar, "2102.00012", "Cascade Probe Title Limited", None,
            vec![
                s2("ARXIV:2102.00012?"),
                s2("ARXIV:2102.00012?"),
                s2("search?query=Cascade%20Probe%20Title%20Limited&limit=10&"),
            ],
            1, 1, Some((TitleSearch, 3))),
        case("c13_oa_doi_hit", OpenAlex, "2102.00013", "Cascade Probe Title", Some("10.5555/cascadeoa"),
            vec!["https://api.openalex.org/works/doi=10.5555/cascadeoa".into()], 1, 0, Some((DirectDoi, 1))),
        case("c14_oa_one_of_seven", OpenAlex, "2102.00014", "Cascade Probe Title Seven", None,
            vec![openalex("Cascade%20Probe%20Title%20Seven")], 1, 0, Some((DirectArxivId, 2))),
        case("c15_oa_no_links", OpenAlex, "2102.00015", "Cascade Probe Title Unlinked", None,
            vec![openalex("Cascade%20Probe%20Title%20Unlinked")], 7, 0, Some((TitleSearch, 3))),
        case("c16_oa_doi_404_search", OpenAlex, "2102.00016", "Cascade Probe Title After Miss",
            Some("10.5555/cascadeoa404"),
            vec![
                "https://api.openalex.org/works/doi=10.5555/cascadeoa404".into(),
                openalex("Cascade%20Probe%20Title%20After%20Miss"),
            ],
            0, 0, None),
    ]
}

fn provider(kind: Kind, t: Arc<dyn Transport>) -> Arc<dyn CandidateProvider> {
    let config = ResolverConfig::for_replay();
    match kind {
        Kind::Dblp => Arc::new(DblpProvider::new(t, &config)),
        Kind::Crossref => Arc::new(CrossrefProvider::new(t, &config)),
        Kind::SemanticScholar => Arc::new(SemanticScholarProvider::new(t, &config)),
        Kind::OpenAlex => Arc::new(OpenAlexProvider::new(t, &config)),
    }
}

/// Replays one case; returns the result and the logged URLs.
pub fn replay_case(case: &Case) -> (ProviderResult, Vec<String>) {
    let transport = Arc::new(
        ReplayTransport::from_dir(&fixtures_dir().join("cascade").join(case.dir)).expect("fixtures"),
    );
    let q = CandidateQuery {
        arxiv_id: ArxivId::parse(case.id).unwrap(),
        title: case.title.to_string(),
        doi: case.doi.map(|d| Doi::parse(d).unwrap()),
    };
    let result = runtime().block_on(provider(case.kind, transport.clone()).query(&q));
    (result, transport.requested_urls())
}

/// Compares a replayed case with its declaration.
pub fn check(case: &Case) -> Result<ProviderResult, String> {
    let (result, urls) = replay_case(case);
    if urls != case.urls {
        return Err(format!("{}: requested {urls:#?}", case.dir));
    }
    if result.candidates.len() != case.candidates {
        return Err(format!("{}: {} candidates", case.dir, result.candidates.len()));
    }
    if result.errors_encountered.len() != case.errors {
        return Err(format!("{}: errors {:?}", case.dir, result.errors_encountered));
    }
    if let Some((kind, step)) = case.discovery {
        if let Some(c) = result
            .candidates
            .iter()
            .find(|c| (c.discovery.kind, c.discovery.cascade_step) != (kind, step))
        {
            return Err(format!("{}: discovery {:?}", case.dir, c.discovery));
        }
    }
    Ok(result)
}
