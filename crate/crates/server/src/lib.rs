//! HTTP service: `GET /api/resolve?id=…`, `GET /api/health`, and the web UI
//! bundle under `/`.

pub mod config;

use std::collections::HashMap;
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::num::NonZeroU32;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use arxres_core::bibtex::BibTexOptions;
use arxres_core::{normalize_arxiv_input, Resolver};
use axum::body::Body;
use axum::extract::{ConnectInfo, FromRequestParts, Query, State};
use axum::http::request::Parts;
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use governor::{DefaultKeyedRateLimiter, Quota, RateLimiter};
use lru::LruCache;
use serde::Serialize;
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

pub use config::{AppConfig, ServerSettings};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

type CacheKey = (String, bool);

struct Cached {
    stored: Instant,
    body: Arc<[u8]>,
}

pub struct AppState {
    resolver: Resolver,
    settings: ServerSettings,
    cache: Option<Mutex<LruCache<CacheKey, Cached>>>,
    limiter: Option<DefaultKeyedRateLimiter<IpAddr>>,
}

impl AppState {
    pub fn new(resolver: Resolver, settings: ServerSettings) -> Self {
        let cache = NonZeroUsize::new(settings.cache_capacity).map(|n| Mutex::new(LruCache::new(n)));
        let limiter = NonZeroU32::new(settings.rate_limit_per_minute)
            .map(|n| RateLimiter::keyed(Quota::per_minute(n)));
        AppState {
            resolver,
            settings,
            cache,
            limiter,
        }
    }

    fn cached(&self, key: &CacheKey) -> Option<Arc<[u8]>> {
        let mut cache = self.cache.as_ref()?.lock().expect("cache lock poisoned");
        let fresh = cache
            .get(key)
            .map(|c| c.stored.elapsed() < self.settings.cache_ttl())?;
        if fresh {
            cache.get(key).map(|c| c.body.clone())
        } else {
            cache.pop(key);
            None
        }
    }

    fn store(&self, key: CacheKey, body: Arc<[u8]>) {
        if let Some(cache) = &self.cache {
            cache.lock().expect("cache lock poisoned").put(
                key,
                Cached {
                    stored: Instant::now(),
                    body,
                },
            );
        }
    }

    pub fn cache_len(&self) -> usize {
        self.cache
            .as_ref()
            .map_or(0, |c| c.lock().expect("cache lock poisoned").len())
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let ui_dir = state.settings.ui_dir.clone();
    let api = Router::new()
        .route("/api/resolve", get(resolve))
        .route("/api/health", get(health))
        .with_state(state);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(|| async { error(StatusCode::NOT_FOUND, "no such endpoint".into()) }),
    }
}

/// Binds the configured address; fails when the port is taken.
pub async fn bind(settings: &ServerSettings) -> std::io::Result<TcpListener> {
    TcpListener::bind((settings.host.as_str(), settings.port)).await
}

pub async fn serve(listener: TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    let app = router(state).into_make_service_with_connect_info::<SocketAddr>();
    axum::serve(listener, app).await
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
    status: u16,
}

fn error(status: StatusCode, message: String) -> Response {
    let body = ErrorBody {
        error: message,
        status: status.as_u16(),
    };
    (status, axum::Json(body)).into_response()
}

fn json_bytes(body: Arc<[u8]>) -> Response {
    let mut r = Response::new(Body::from(body.to_vec()));
    r.headers_mut()
        .insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
    r
}

/// Peer address, or loopback when the server runs without connection info
/// (as in tests driving the router directly).
struct ClientIp(IpAddr);

impl<S: Send + Sync> FromRequestParts<S> for ClientIp {
    type Rejection = std::convert::Infallible;

    async fn from_request_parts(parts: &mut Parts, _: &S) -> Result<Self, Self::Rejection> {
        let ip = parts
            .extensions
            .get::<ConnectInfo<SocketAddr>>()
            .map_or(IpAddr::V4(Ipv4Addr::LOCALHOST), |c| c.0.ip());
        Ok(ClientIp(ip))
    }
}

fn flag(params: &HashMap<String, String>, name: &str) -> bool {
    params
        .get(name)
        .is_some_and(|v| matches!(v.as_str(), "1" | "true" | "yes"))
}

async fn resolve(
    State(app): State<Arc<AppState>>,
    ClientIp(ip): ClientIp,
    Query(params): Query<HashMap<String, String>>,
) -> Response {
    if let Some(limiter) = &app.limiter {
        if limiter.check_key(&ip).is_err() {
            let mut r = error(StatusCode::TOO_MANY_REQUESTS, "rate limit exceeded".into());
            r.headers_mut()
                .insert(header::RETRY_AFTER, HeaderValue::from_static("60"));
            return r;
        }
    }
    let Some(raw) = params.get("id") else {
        return error(StatusCode::BAD_REQUEST, "missing id parameter".into());
    };
    let options = BibTexOptions {
        tex_escape: flag(&params, "tex_escape"),
    };
    let id = match normalize_arxiv_input(raw) {
        Ok(id) => id,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let key = (id.normalized().to_string(), options.tex_escape);
    if let Some(body) = app.cached(&key) {
        return json_bytes(body);
    }
    let started = Instant::now();
    match app.resolver.resolve_response(raw, options).await {
        Ok(response) => {
            let body: Arc<[u8]> = match serde_json::to_vec(&response) {
                Ok(b) => b.into(),
                Err(e) => return error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
            };
            tracing::info!(id = %key.0, elapsed_ms = started.elapsed().as_millis() as u64, "resolved");
            app.store(key, body.clone());
            json_bytes(body)
        }
        Err(e) => {
            let status = StatusCode::from_u16(e.http_status()).unwrap_or(StatusCode::BAD_GATEWAY);
            error(status, e.to_string())
        }
    }
}

#[derive(Serialize)]
struct Health {
    status: &'static str,
    version: &'static str,
    mode: &'static str,
}

async fn health(State(app): State<Arc<AppState>>) -> Response {
    axum::Json(Health {
        status: "ok",
        version: VERSION,
        mode: app.resolver.mode().as_str(),
    })
    .into_response()
}
