//! Resolver configuration: endpoints, politeness settings, timeouts and
//! thresholds. Loaded from TOML with `ARXRES_*` environment overrides.

use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcher::MatchThresholds;
use crate::model::SourceDatabase;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Endpoints {
    pub arxiv: String,
    pub dblp: String,
    pub crossref: String,
    pub doi: String,
    pub semantic_scholar: String,
    pub openalex: String,
}

impl Default for Endpoints {
    fn default() -> Self {
        Endpoints {
            arxiv: "https://export.arxiv.org".into(),
            dblp: "https://dblp.org".into(),
            crossref: "https://api.crossref.org".into(),
            doi: "https://doi.org".into(),
            semantic_scholar: "https://api.semanticscholar.org".into(),
            openalex: "https://api.openalex.org".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResolverConfig {
    pub endpoints: Endpoints,
    pub semantic_scholar_api_key: Option<String>,
    /// Contact address for the OpenAlex `mailto` parameter and the user agent.
    pub mailto: Option<String>,
    pub user_agent: String,
    pub provider_timeout_ms: u64,
    pub resolution_budget_ms: u64,
    pub arxiv_attempts: u32,
    pub retry_base_delay_ms: u64,
    pub rate_limit_retry_delay_ms: u64,
    pub thresholds: MatchThresholds,
    pub databases: Vec<SourceDatabase>,
}

impl Default for ResolverConfig {
    fn default() -> Self {
        ResolverConfig {
            endpoints: Endpoints::default(),
            semantic_scholar_api_key: None,
            mailto: None,
            user_agent: format!("arxres/{}", env!("CARGO_PKG_VERSION")),
            provider_timeout_ms: 10_000,
            resolution_budget_ms: 30_000,
            arxiv_attempts: 3,
            retry_base_delay_ms: 1_000,
            rate_limit_retry_delay_ms: 2_000,
            thresholds: MatchThresholds::default(),
            databases: SourceDatabase::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {0}: {1}")]
    Io(String, std::io::Error),
    #[error("parsing {0}: {1}")]
    Toml(String, toml::de::Error),
    #[error("environment variable {0}: {1}")]
    Env(String, String),
    #[error(transparent)]
    Thresholds(#[from] crate::matcher::MatchError),
}

impl ResolverConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: ResolverConfig =
            toml::from_str(text).map_err(|e| ConfigError::Toml("<string>".into(), e))?;
        config.thresholds.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(path.display().to_string(), e))?;
        let config: ResolverConfig =
            toml::from_str(&text).map_err(|e| ConfigError::Toml(path.display().to_string(), e))?;
        config.thresholds.validate()?;
        Ok(config)
    }

    /// Applies `ARXRES_*` overrides read through `lookup`.
    pub fn apply_env<F>(&mut self, lookup: F) -> Result<(), ConfigError>
    where
        F: Fn(&str) -> Option<String>,
    {
        let string_vars: [(&str, &mut String); 7] = [
            ("ARXRES_USER_AGENT", &mut self.user_agent),
            ("ARXRES_ARXIV_URL", &mut self.endpoints.arxiv),
            ("ARXRES_DBLP_URL", &mut self.endpoints.dblp),
            ("ARXRES_CROSSREF_URL", &mut self.endpoints.crossref),
            ("ARXRES_DOI_URL", &mut self.endpoints.doi),
            ("ARXRES_SEMANTIC_SCHOLAR_URL", &mut self.endpoints.semantic_scholar),
            ("ARXRES_OPENALEX_URL", &mut self.endpoints.openalex),
        ];
        for (name, slot) in string_vars {
            if let Some(v) = lookup(name) {
                *slot = v;
            }
        }
        if let Some(v) = lookup("ARXRES_SEMANTIC_SCHOLAR_API_KEY") {
            self.semantic_scholar_api_key = Some(v).filter(|s| !s.is_empty());
        }
        if let Some(v) = lookup("ARXRES_MAILTO") {
            self.mailto = Some(v).filter(|s| !s.is_empty());
        }
        let number_vars: [(&str, &mut u64); 2] = [
            ("ARXRES_PROVIDER_TIMEOUT_MS", &mut self.provider_timeout_ms),
            ("ARXRES_RESOLUTION_BUDGET_MS", &mut self.resolution_budget_ms),
        ];
        for (name, slot) in number_vars {
            if let Some(v) = lookup(name) {
                *slot = v
                    .parse()
                    .map_err(|_| ConfigError::Env(name.into(), format!("not a number: {v}")))?;
            }
        }
        Ok(())
    }

    pub fn user_agent_header(&self) -> String {
        match &self.mailto {
            Some(mail) => format!("{} (mailto:{mail})", self.user_agent),
            None => self.user_agent.clone(),
        }
    }

    pub fn provider_timeout(&self) -> Duration {
        Duration::from_millis(self.provider_timeout_ms)
    }

    pub fn resolution_budget(&self) -> Duration {
        Duration::from_millis(self.resolution_budget_ms)
    }

    /// Config for fast offline tests: no retry delays.
    pub fn for_replay() -> Self {
        ResolverConfig {
            retry_base_delay_ms: 0,
            rate_limit_retry_delay_ms: 0,
            ..ResolverConfig::default()
        }
    }
}
