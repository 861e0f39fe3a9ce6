//! End-to-end resolution: normalize, fetch, query, filter, render.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arxiv::{ArxivClient, ArxivError};
use crate::bibtex::{render_report, BibTexOptions};
use crate::config::ResolverConfig;
use crate::http::{Transport, TransportMode};
use crate::id::{normalize_arxiv_input, IdError};
use crate::matcher::resolve;
use crate::model::{
    FilterDecision, FilterMode, PreprintRecord, PublicationCandidate, ResolutionReport,
    SourceDatabase,
};
use crate::providers::{CandidateProvider, CandidateQuery, ProviderResult, Providers};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error(transparent)]
    Input(#[from] IdError),
    #[error(transparent)]
    Arxiv(#[from] ArxivError),
}

impl ResolveError {
    /// HTTP status the service answers with.
    pub fn http_status(&self) -> u16 {
        match self {
            ResolveError::Input(_) => 400,
            ResolveError::Arxiv(ArxivError::NotFound(_)) => 404,
            ResolveError::Arxiv(_) => 502,
        }
    }

    /// Process exit code of the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            ResolveError::Input(_) => 2,
            ResolveError::Arxiv(_) => 3,
        }
    }
}

/// A report together with the raw per-database results it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    pub report: ResolutionReport,
    pub provider_results: Vec<ProviderResult>,
}

/// One accepted candidate as served to clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateView {
    #[serde(flatten)]
    pub candidate: PublicationCandidate,
    pub filter_mode: FilterMode,
    pub bibtex: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolveResponse {
    pub preprint: PreprintRecord,
    pub preprint_bibtex: String,
    pub candidates: BTreeMap<SourceDatabase, Vec<CandidateView>>,
    pub trace: Vec<FilterDecision>,
    pub resolved: bool,
    /// Upstream milliseconds per database.
    pub timing: BTreeMap<SourceDatabase, u64>,
    pub errors: BTreeMap<SourceDatabase, Vec<String>>,
    pub warnings: Vec<String>,
}

impl ResolveResponse {
    pub fn build(resolution: &Resolution, options: BibTexOptions) -> Self {
        let report = &resolution.report;
        let rendered = render_report(report, options);
        let mode_of = |db: SourceDatabase| {
            resolution
                .provider_results
                .iter()
                .find(|r| r.source == db)
                .map_or(FilterMode::Strong, |r| r.filter_mode)
        };
        let candidates = report
            .per_database
            .iter()
            .zip(&rendered.candidates)
            .map(|((db, list), (_, entries))| {
                let views = list
                    .iter()
                    .zip(entries)
                    .map(|(c, e)| CandidateView {
                        candidate: c.clone(),
                        filter_mode: mode_of(*db),
                        bibtex: e.as_ref().map(|e| e.render()),
                    })
                    .collect();
                (*db, views)
            })
            .collect();
        let timing = resolution
            .provider_results
            .iter()
            .map(|r| (r.source, r.elapsed_ms))
            .collect();
        let errors = resolution
            .provider_results
            .iter()
            .map(|r| (r.source, r.errors_encountered.clone()))
            .collect();
        ResolveResponse {
            preprint: report.preprint.clone(),
            preprint_bibtex: rendered.preprint.render(),
            candidates,
            trace: report.trace.clone(),
            resolved: report.resolved,
            timing,
            errors,
            warnings: report.warnings.clone(),
        }
    }

    /// All candidate BibTeX entries, one blank line apart.
    pub fn bibtex(&self) -> String {
        self.candidates
            .values()
            .flatten()
            .filter_map(|c| c.bibtex.as_deref())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

pub struct Resolver {
    arxiv: ArxivClient,
    providers: Providers,
    config: ResolverConfig,
    mode: TransportMode,
}

impl Resolver {
    pub fn new(transport: Arc<dyn Transport>, config: ResolverConfig) -> Self {
        Resolver {
            arxiv: ArxivClient::new(transport.clone(), &config),
            providers: Providers::new(transport.clone(), &config),
            mode: transport.mode(),
            config,
        }
    }

    /// Uses custom candidate providers; arXiv still goes through `transport`.
    pub fn with_providers(
        transport: Arc<dyn Transport>,
        providers: Vec<Arc<dyn CandidateProvider>>,
        config: ResolverConfig,
    ) -> Self {
        Resolver {
            arxiv: ArxivClient::new(transport.clone(), &config),
            providers: Providers::from_providers(providers, &config),
            mode: transport.mode(),
            config,
        }
    }

    pub fn config(&self) -> &ResolverConfig {
        &self.config
    }

    pub fn mode(&self) -> TransportMode {
        self.mode
    }

    pub async fn resolve_id(&self, raw: &str) -> Result<Resolution, ResolveError> {
        let id = normalize_arxiv_input(raw)?;
        let budget = self.config.resolution_budget();
        let started = Instant::now();
        let fetched = match tokio::time::timeout(budget, self.arxiv.fetch_preprint(&id)).await {
            Ok(result) => result?,
            Err(_) => {
                return Err(ArxivError::Network(format!(
                    "no answer within {} ms",
                    budget.as_millis()
                ))
                .into())
            }
        };
        let remaining = budget.saturating_sub(started.elapsed()).max(Duration::from_millis(1));
        let query = CandidateQuery::from_preprint(&fetched.record);
        let provider_results = self.providers.query_all_within(&query, remaining).await;
        let mut report = resolve(&fetched.record, &provider_results, &self.config.thresholds);
        report.warnings = fetched.warnings;
        Ok(Resolution {
            report,
            provider_results,
        })
    }

    pub async fn resolve_response(
        &self,
        raw: &str,
        options: BibTexOptions,
    ) -> Result<ResolveResponse, ResolveError> {
        let resolution = self.resolve_id(raw).await?;
        Ok(ResolveResponse::build(&resolution, options))
    }
}
