//! Service settings plus the resolver configuration, from one TOML file.

use std::path::{Path, PathBuf};
use std::time::Duration;

use arxres_core::config::ConfigError;
use arxres_core::ResolverConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServerSettings {
    pub host: String,
    pub port: u16,
    pub cache_ttl_secs: u64,
    /// Zero disables the cache.
    pub cache_capacity: usize,
    /// Resolutions per minute and client address. Zero disables the limit.
    pub rate_limit_per_minute: u32,
    pub ui_dir: Option<PathBuf>,
}

impl Default for ServerSettings {
    fn default() -> Self {
        ServerSettings {
            host: "127.0.0.1".into(),
            port: 8080,
            cache_ttl_secs: 24 * 60 * 60,
            cache_capacity: 10_000,
            rate_limit_per_minute: 10,
            ui_dir: None,
        }
    }
}

impl ServerSettings {
    pub fn cache_ttl(&self) -> Duration {
        Duration::from_secs(self.cache_ttl_secs)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AppConfig {
    pub server: ServerSettings,
    pub resolver: ResolverConfig,
}

impl AppConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: AppConfig =
            toml::from_str(text).map_err(|e| ConfigError::Toml("<string>".into(), e))?;
        config.resolver.thresholds.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(path.display().to_string(), e))?;
        let config: AppConfig =
            toml::from_str(&text).map_err(|e| ConfigError::Toml(path.display().to_string(), e))?;
        config.resolver.thresholds.validate()?;
        Ok(config)
    }

    /// File (if any), then `ARXRES_*` variables from the process environment.
    pub fn load_with_env(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut config = match path {
            Some(p) => AppConfig::load(p)?,
            None => AppConfig::default(),
        };
        config.apply_env(|k| std::env::var(k).ok())?;
        Ok(config)
    }

    pub fn apply_env<F>(&mut self, lookup: F) -> Result<(), ConfigError>
    where
        F: Fn(&str) -> Option<String>,
    {
        self.resolver.apply_env(&lookup)?;
        let s = &mut self.server;
        if let Some(v) = lookup("ARXRES_HOST") {
            s.host = v;
        }
        if let Some(v) = lookup("ARXRES_UI_DIR") {
            s.ui_dir = Some(v).filter(|v| !v.is_empty()).map(PathBuf::from);
        }
        fn parse<T: std::str::FromStr>(name: &str, v: String) -> Result<T, ConfigError> {
            v.parse()
                .map_err(|_| ConfigError::Env(name.into(), format!("not a number: {v}")))
        }
        if let Some(v) = lookup("ARXRES_PORT") {
            s.port = parse("ARXRES_PORT", v)?;
        }
        if let Some(v) = lookup("ARXRES_CACHE_TTL_SECS") {
            s.cache_ttl_secs = parse("ARXRES_CACHE_TTL_SECS", v)?;
        }
        if let Some(v) = lookup("ARXRES_CACHE_CAPACITY") {
            s.cache_capacity = parse("ARXRES_CACHE_CAPACITY", v)?;
        }
        if let Some(v) = lookup("ARXRES_RATE_LIMIT_PER_MINUTE") {
            s.rate_limit_per_minute = parse("ARXRES_RATE_LIMIT_PER_MINUTE", v)?;
        }
        Ok(())
    }
}
