//! HTTP transport with live, replay and record modes.
//!
//! Fixture files hold one exchange each: the first line is the request URL,
//! optionally followed by a space and the HTTP status (200 when omitted); the
//! remaining bytes are the verbatim response body. Replay matches on the exact
//! URL and logs every request, so tests can assert which cascade steps ran.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use async_trait::async_trait;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const FIXTURE_EXTENSION: &str = "fixture";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpRequest {
    pub url: String,
    pub headers: Vec<(String, String)>,
}

impl HttpRequest {
    pub fn get(url: impl Into<String>) -> Self {
        HttpRequest {
            url: url.into(),
            headers: Vec::new(),
        }
    }

    pub fn header(mut self, name: &str, value: impl Into<String>) -> Self {
        self.headers.push((name.to_string(), value.into()));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
    /// Time spent upstream. Replayed responses report zero.
    pub elapsed: Duration,
}

impl HttpResponse {
    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("network error: {0}")]
    Network(String),
    #[error("request timed out")]
    Timeout,
    #[error("no fixture recorded for {0}")]
    NoFixture(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TransportMode {
    Live,
    Replay,
    Record,
}

impl TransportMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TransportMode::Live => "live",
            TransportMode::Replay => "replay",
            TransportMode::Record => "record",
        }
    }
}

#[async_trait]
pub trait Transport: Send + Sync {
    async fn get(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError>;
    fn mode(&self) -> TransportMode;
}

/// Real network access through reqwest.
pub struct LiveTransport {
    client: reqwest::Client,
}

impl LiveTransport {
    pub fn new(timeout: Duration) -> Result<Self, TransportError> {
        let client = reqwest::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| TransportError::Network(e.to_string()))?;
        Ok(LiveTransport { client })
    }
}

#[async_trait]
impl Transport for LiveTransport {
    async fn get(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let started = Instant::now();
        let mut builder = self.client.get(&request.url);
        for (name, value) in &request.headers {
            builder = builder.header(name.as_str(), value.as_str());
        }
        let response = builder.send().await.map_err(map_reqwest_error)?;
        let status = response.status().as_u16();
        let body = response.text().await.map_err(map_reqwest_error)?;
        Ok(HttpResponse {
            status,
            body,
            elapsed: started.elapsed(),
        })
    }

    fn mode(&self) -> TransportMode {
        TransportMode::Live
    }
}

fn map_reqwest_error(e: reqwest::Error) -> TransportError {
    if e.is_timeout() {
        TransportError::Timeout
    } else {
        TransportError::Network(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub url: String,
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {reason}")]
    Malformed { path: PathBuf, reason: String },
    #[error("URL {url} is recorded in both {first} and {second}")]
    Duplicate {
        url: String,
        first: PathBuf,
        second: PathBuf,
    },
}

impl Fixture {
    pub fn parse(text: &str) -> Result<Fixture, String> {
        let (first, body) = match text.split_once('\n') {
            Some((first, body)) => (first.trim_end_matches('\r'), body),
            None => (text, ""),
        };
        let mut parts = first.split(' ');
        let url = parts.next().unwrap_or_default();
        if url.is_empty() {
            return Err("first line must hold the request URL".to_string());
        }
        let status = match parts.next() {
            Some(s) => s.parse().map_err(|_| format!("bad status {s:?}"))?,
            None => 200,
        };
        if parts.next().is_some() {
            return Err("unexpected text after status".to_string());
        }
        Ok(Fixture {
            url: url.to_string(),
            status,
            body: body.to_string(),
        })
    }

    pub fn render(&self) -> String {
        if self.status == 200 {
            format!("{}\n{}", self.url, self.body)
        } else {
            format!("{} {}\n{}", self.url, self.status, self.body)
        }
    }

    /// File name used when recording: a digest of the URL.
    pub fn file_name(url: &str) -> String {
        let digest = Sha256::digest(url.as_bytes());
        format!("{}.{FIXTURE_EXTENSION}", hex::encode(&digest[..12]))
    }
}

/// Loads every `*.fixture` file below `dir`, recursively.
pub fn load_fixtures(dir: &Path) -> Result<HashMap<String, Fixture>, FixtureError> {
    let mut found: HashMap<String, (Fixture, PathBuf)> = HashMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(current) = stack.pop() {
        let entries = fs::read_dir(&current).map_err(|source| FixtureError::Io {
            path: current.clone(),
            source,
        })?;
        for entry in entries {
            let path = entry
                .map_err(|source| FixtureError::Io {
                    path: current.clone(),
                    source,
                })?
                .path();
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            if path.extension().and_then(|e| e.to_str()) != Some(FIXTURE_EXTENSION) {
                continue;
            }
            let text = fs::read_to_string(&path).map_err(|source| FixtureError::Io {
                path: path.clone(),
                source,
            })?;
            let fixture = Fixture::parse(&text).map_err(|reason| FixtureError::Malformed {
                path: path.clone(),
                reason,
            })?;
            if let Some((_, first)) = found.get(&fixture.url) {
                return Err(FixtureError::Duplicate {
                    url: fixture.url,
                    first: first.clone(),
                    second: path,
                });
            }
            found.insert(fixture.url.clone(), (fixture, path));
        }
    }
    Ok(found.into_iter().map(|(url, (f, _))| (url, f)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoggedRequest {
    pub url: String,
    pub matched: bool,
}

/// Serves responses from recorded fixtures and logs every request.
pub struct ReplayTransport {
    fixtures: HashMap<String, Fixture>,
    log: Mutex<Vec<LoggedRequest>>,
}

impl ReplayTransport {
    pub fn from_dir(dir: &Path) -> Result<Self, FixtureError> {
        Ok(Self::from_fixtures(load_fixtures(dir)?.into_values()))
    }

    pub fn from_fixtures(fixtures: impl IntoIterator<Item = Fixture>) -> Self {
        ReplayTransport {
            fixtures: fixtures.into_iter().map(|f| (f.url.clone(), f)).collect(),
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn request_log(&self) -> Vec<LoggedRequest> {
        self.log.lock().expect("replay log poisoned").clone()
    }

    pub fn requested_urls(&self) -> Vec<String> {
        self.request_log().into_iter().map(|r| r.url).collect()
    }

    /// Requests that had no fixture; non-empty means a test hit an
    /// unexpected cascade step.
    pub fn unmatched(&self) -> Vec<String> {
        self.request_log()
            .into_iter()
            .filter(|r| !r.matched)
            .map(|r| r.url)
            .collect()
    }

    pub fn clear_log(&self) {
        self.log.lock().expect("replay log poisoned").clear();
    }

    pub fn len(&self) -> usize {
        self.fixtures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fixtures.is_empty()
    }
}

#[async_trait]
impl Transport for ReplayTransport {
    async fn get(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let fixture = self.fixtures.get(&request.url);
        self.log
            .lock()
            .expect("replay log poisoned")
            .push(LoggedRequest {
                url: request.url.clone(),
                matched: fixture.is_some(),
            });
        match fixture {
            Some(f) => Ok(HttpResponse {
                status: f.status,
                body: f.body.clone(),
                elapsed: Duration::ZERO,
            }),
            None => Err(TransportError::NoFixture(request.url.clone())),
        }
    }

    fn mode(&self) -> TransportMode {
        TransportMode::Replay
    }
}

/// Forwards to the network and writes each exchange into a fixture directory.
pub struct RecordingTransport {
    inner: Arc<dyn Transport>,
    dir: PathBuf,
}

impl RecordingTransport {
    pub fn new(inner: Arc<dyn Transport>, dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(RecordingTransport { inner, dir })
    }
}

#[async_trait]
impl Transport for RecordingTransport {
    async fn get(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let response = self.inner.get(request).await?;
        let fixture = Fixture {
            url: request.url.clone(),
            status: response.status,
            body: response.body.clone(),
        };
        let path = self.dir.join(Fixture::file_name(&request.url));
        if let Err(e) = fs::write(&path, fixture.render()) {
            tracing::warn!("could not record {}: {e}", path.display());
        }
        Ok(response)
    }

    fn mode(&self) -> TransportMode {
        TransportMode::Record
    }
}

/// Where responses come from: fixtures, the network, or the network with
/// every exchange written to a directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransportSource {
    Live,
    Replay(PathBuf),
    Record(PathBuf),
}

#[derive(Debug, Error)]
pub enum TransportSetupError {
    #[error(transparent)]
    Fixtures(#[from] FixtureError),
    #[error(transparent)]
    Client(#[from] TransportError),
    #[error("creating {0}: {1}")]
    RecordDir(PathBuf, std::io::Error),
}

pub fn build_transport(
    source: &TransportSource,
    timeout: Duration,
) -> Result<Arc<dyn Transport>, TransportSetupError> {
    Ok(match source {
        TransportSource::Live => Arc::new(LiveTransport::new(timeout)?),
        TransportSource::Replay(dir) => Arc::new(ReplayTransport::from_dir(dir)?),
        TransportSource::Record(dir) => {
            let live: Arc<dyn Transport> = Arc::new(LiveTransport::new(timeout)?);
            Arc::new(
                RecordingTransport::new(live, dir)
                    .map_err(|e| TransportSetupError::RecordDir(dir.clone(), e))?,
            )
        }
    })
}
