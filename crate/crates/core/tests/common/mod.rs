#![allow(dead_code)]

pub mod cascade;

use std::path::PathBuf;
use std::sync::Arc;

use arxres_core::http::ReplayTransport;
use arxres_core::{Resolver, ResolverConfig, SourceDatabase};

pub const D: SourceDatabase = SourceDatabase::Dblp;
pub const C: SourceDatabase = SourceDatabase::CrossrefCrosscite;
pub const S: SourceDatabase = SourceDatabase::SemanticScholar;
pub const O: SourceDatabase = SourceDatabase::OpenAlex;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn corpus_dir() -> PathBuf {
    fixtures_dir().join("corpus")
}

/// Directory of scenario `n` (1-based) inside the corpus.
pub fn scenario_dir(n: usize) -> PathBuf {
    let prefix = format!("s{n:02}_");
    std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .find(|p| {
            p.file_name()
                .and_then(|f| f.to_str())
                .is_some_and(|f| f.starts_with(&prefix))
        })
        .unwrap_or_else(|| panic!("no scenario {n}"))
}

pub fn scenario_id(n: usize) -> String {
    format!("2101.{n:05}")
}

pub fn replay(dir: &std::path::Path) -> Arc<ReplayTransport> {
    Arc::new(ReplayTransport::from_dir(dir).expect("fixtures load"))
}

pub fn resolver(transport: Arc<ReplayTransport>) -> Resolver {
    Resolver::new(transport, ResolverConfig::for_replay())
}

/// Databases expected to resolve each scenario, in scenario order.
pub const EXPECTED: [&[SourceDatabase]; 20] = [
    &[D],
    &[C],
    &[C],
    &[S],
    &[S],
    &[O],
    &[O],
    &[D, C, S, O],
    &[D, C, S, O],
    &[],
    &[],
    &[S],
    &[],
    &[],
    &[D],
    &[C],
    &[S, O],
    &[D, C],
    &[D, C],
    &[D, O],
];

pub fn runtime() -> tokio::runtime::Runtime {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .expect("tokio runtime")
}

pub mod gen {
    use arxres_core::{
        ArxivId, DiscoveryKind, DiscoveryPath, Doi, PersonName, PreprintRecord,
        PublicationCandidate, SourceDatabase,
    };
    use chrono::NaiveDate;
    use rand::seq::IndexedRandom;
    use rand::Rng;

    const TITLES: [&str; 4] = [
        "Learning Sparse Representations for Graph Neural Networks",
        "Learning Sparse Representations for Graph Neural Network",
        "Sparse Representations for Graph Neural Networks: A Study",
        "An Entirely Different Paper About Databases",
    ];
    const SURNAMES: [&str; 6] = ["Smith", "Chen", "Müller", "Garcia", "Novak", "Ito"];
    const VENUES: [&str; 5] = ["ICML", "arXiv", "CoRR", "J. Mach. Learn. Res.", "  "];
    const DOIS: [&str; 3] = ["10.5555/pre", "10.5555/other", "10.48550/arxiv.2101.00001"];
    const TYPES: [&str; 3] = ["Conference", "JournalArticle", "Review"];

    pub fn preprint<R: Rng>(rng: &mut R) -> PreprintRecord {
        let n_authors = rng.random_range(1..=4);
        let date = NaiveDate::from_ymd_opt(2021, 1, 1).unwrap();
        PreprintRecord {
            id: ArxivId::parse("2101.00001").unwrap(),
            latest_version: 1,
            title: TITLES[0].to_string(),
            authors: SURNAMES[..n_authors]
                .iter()
                .map(|s| PersonName::new(&format!("A. {s}")))
                .collect(),
            doi: if rng.random_bool(0.5) {
                Doi::parse(DOIS[0])
            } else {
                None
            },
            published_date: date,
            updated_date: date,
            primary_category: "cs.LG".into(),
            categories: vec!["cs.LG".into()],
            comment: None,
            journal_ref: None,
            abstract_text: String::new(),
        }
    }

    pub fn candidate<R: Rng>(rng: &mut R, source: SourceDatabase) -> PublicationCandidate {
        let kind = *[
            DiscoveryKind::DirectArxivId,
            DiscoveryKind::DirectDoi,
            DiscoveryKind::TitleSearch,
        ]
        .choose(rng)
        .unwrap();
        let title = TITLES.choose(rng).unwrap();
        let mut c = PublicationCandidate::new(source, DiscoveryPath::new(kind, rng.random_range(1..=3)), title);
        let n = rng.random_range(0..=5);
        c.authors = (0..n)
            .map(|_| PersonName::new(&format!("B. {}", SURNAMES.choose(rng).unwrap())))
            .collect();
        if rng.random_bool(0.7) {
            c.venue = Some(VENUES.choose(rng).unwrap().to_string());
        }
        if rng.random_bool(0.6) {
            c.publication_types = vec![TYPES.choose(rng).unwrap().to_string()];
        }
        if rng.random_bool(0.6) {
            c.doi = Doi::parse(DOIS.choose(rng).unwrap());
        }
        if rng.random_bool(0.3) {
            c.external_ids.insert("arxiv".into(), "2101.00001".into());
        }
        c.year = Some(rng.random_range(2020..=2023));
        c.citation_count = Some(rng.random_range(0..50));
        c
    }

    pub fn candidates<R: Rng>(rng: &mut R) -> Vec<PublicationCandidate> {
        let source = *SourceDatabase::ALL.choose(rng).unwrap();
        let n = rng.random_range(0..=8);
        (0..n).map(|_| candidate(rng, source)).collect()
    }
}

/// Hand-computed filter trace of each scenario: per database, one code per
/// candidate in provider order.
pub const EXPECTED_TRACE: [&str; 20] = [
    "D:ok",
    "C:ok,TITLE",
    "C:ok",
    "S:ok",
    "S:ok,TITLE",
    "O:ok",
    "O:TITLE,ok,TITLE",
    "D:ok C:ok S:ok O:ok",
    "D:ok C:ok S:ok O:ok",
    "",
    "",
    "D:TITLE S:ok",
    "D:DOI S:DOI",
    "D:SELF S:SELF O:SELF",
    "D:ok S:TYPE",
    "D:AUTHOR C:ok",
    "S:ok O:ok",
    "D:ok,ok,SELF C:ok",
    "D:ok C:ok",
    "D:ok O:ok",
];

/// Hand-computed number of errors per database, in database order.
pub const EXPECTED_ERRORS: [[usize; 4]; 20] = {
    let mut e = [[0; 4]; 20];
    e[10] = [1, 1, 1, 0];
    e
};

pub fn trace_signature(report: &arxres_core::ResolutionReport) -> String {
    use arxres_core::FilterRule::*;
    let letter = |db: SourceDatabase| match db {
        SourceDatabase::Dblp => "D",
        SourceDatabase::CrossrefCrosscite => "C",
        SourceDatabase::SemanticScholar => "S",
        SourceDatabase::OpenAlex => "O",
    };
    SourceDatabase::ALL
        .iter()
        .filter_map(|&db| {
            let mut entries: Vec<_> = report.trace.iter().filter(|d| d.source == db).collect();
            if entries.is_empty() {
                return None;
            }
            entries.sort_by_key(|d| d.candidate_index);
            let codes: Vec<&str> = entries
                .iter()
                .map(|d| match d.rule {
                    None => "ok",
                    Some(SelfMatch) => "SELF",
                    Some(MissingTypeOrVenue) => "TYPE",
                    Some(DoiMismatch) => "DOI",
                    Some(TitleDistance) => "TITLE",
                    Some(AuthorRatio) => "AUTHOR",
                })
                .collect();
            Some(format!("{}:{}", letter(db), codes.join(",")))
        })
        .collect::<Vec<_>>()
        .join(" ")
}
