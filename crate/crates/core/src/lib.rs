//! Resolve arXiv preprints to their published versions.
//!
//! The resolver fetches preprint metadata from arXiv, queries DBLP,
//! CrossRef/CrossCite, Semantic Scholar and OpenAlex for candidate
//! publications, filters them, and renders BibTeX for what survives.

pub mod arxiv;
pub mod bibtex;
pub mod config;
pub mod eval;
pub mod http;
pub mod id;
pub mod matcher;
pub mod model;
pub mod pipeline;
pub mod providers;

pub use config::ResolverConfig;
pub use id::{normalize_arxiv_input, IdError};
pub use matcher::{resolve, strong_filter, weak_filter, MatchThresholds};
pub use model::*;
pub use providers::{CandidateQuery, ProviderResult, Providers};
pub use pipeline::{Resolution, ResolveError, ResolveResponse, Resolver};
