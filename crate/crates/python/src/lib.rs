//! Python bindings: id normalization, the matching primitives and a
//! resolver over live, recorded or replayed upstreams.

use std::path::PathBuf;

use arxres_core::bibtex::BibTexOptions;
use arxres_core::http::{build_transport, TransportSource};
use arxres_core::matcher::{
    author_ratio as core_author_ratio, levenshtein as core_lev, title_ratio as core_title_ratio,
};
use arxres_core::{
    normalize_arxiv_input, MatchThresholds, PersonName, ResolveError, ResolveResponse, Resolver,
    ResolverConfig, SourceDatabase,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(arxres, UpstreamError, PyRuntimeError);

fn resolve_error(e: ResolveError) -> PyErr {
    match e {
        ResolveError::Input(e) => PyValueError::new_err(e.to_string()),
        other => UpstreamError::new_err(other.to_string()),
    }
}

/// Canonical form of an arXiv id or URL, without version.
#[pyfunction]
fn normalize_id(raw: &str) -> PyResult<String> {
    normalize_arxiv_input(raw)
        .map(|id| id.normalized().to_string())
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn levenshtein(a: &str, b: &str) -> usize {
    core_lev(a, b)
}

#[pyfunction]
fn title_ratio(a: &str, b: &str) -> PyResult<f64> {
    core_title_ratio(a, b).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn author_ratio(a: Vec<String>, b: Vec<String>) -> f64 {
    let names = |v: &[String]| v.iter().map(|s| PersonName::new(s)).collect::<Vec<_>>();
    core_author_ratio(&names(&a), &names(&b))
}

fn parse_databases(names: &[String]) -> Result<Vec<SourceDatabase>, String> {
    names
        .iter()
        .map(|n| SourceDatabase::from_name(n).ok_or_else(|| format!("unknown database {n:?}")))
        .collect()
}

/// Outcome of one resolution.
#[pyclass(frozen, module = "arxres")]
struct Resolution {
    response: ResolveResponse,
}

#[pymethods]
impl Resolution {
    #[getter]
    fn arxiv_id(&self) -> String {
        self.response.preprint.id.normalized().to_string()
    }

    #[getter]
    fn title(&self) -> String {
        self.response.preprint.title.clone()
    }

    #[getter]
    fn resolved(&self) -> bool {
        self.response.resolved
    }

    /// Wire names of the databases that kept at least one candidate.
    #[getter]
    fn databases(&self) -> Vec<&'static str> {
        self.response
            .candidates
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(db, _)| db.as_str())
            .collect()
    }

    #[getter]
    fn bibtex(&self) -> String {
        self.response.bibtex()
    }

    #[getter]
    fn preprint_bibtex(&self) -> String {
        self.response.preprint_bibtex.clone()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.response).expect("response serializes")
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let json = py.import("json")?;
        json.call_method1("loads", (self.to_json(),))
    }

    fn __repr__(&self) -> String {
        let dbs: Vec<String> = self.databases().iter().map(|d| format!("'{d}'")).collect();
        format!(
            "Resolution(arxiv_id='{}', resolved={}, databases=[{}])",
            self.arxiv_id(),
            if self.resolved() { "True" } else { "False" },
            dbs.join(", ")
        )
    }
}

#[pyclass(frozen, name = "Resolver", module = "arxres")]
struct PyResolver {
    inner: Resolver,
    runtime: tokio::runtime::Runtime,
}

#[pymethods]
impl PyResolver {
    /// `fixtures` replays a recorded directory, `record` writes one while
    /// querying live; neither means live.
    #[new]
    #[pyo3(signature = (fixtures=None, record=None, title_ratio=None, author_ratio=None, databases=None))]
    fn new(
        fixtures: Option<PathBuf>,
        record: Option<PathBuf>,
        title_ratio: Option<f64>,
        author_ratio: Option<f64>,
        databases: Option<Vec<String>>,
    ) -> PyResult<Self> {
        let source = match (fixtures, record) {
            (Some(_), Some(_)) => {
                return Err(PyValueError::new_err("fixtures and record are exclusive"))
            }
            (Some(dir), None) => TransportSource::Replay(dir),
            (None, Some(dir)) => TransportSource::Record(dir),
            (None, None) => TransportSource::Live,
        };
        let mut config = match source {
            TransportSource::Replay(_) => ResolverConfig::for_replay(),
            _ => ResolverConfig::default(),
        };
        let defaults = config.thresholds;
        config.thresholds = MatchThresholds::new(
            title_ratio.unwrap_or(defaults.title_ratio_max),
            author_ratio.unwrap_or(defaults.author_ratio_min),
        )
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
        if let Some(names) = databases {
            config.databases = parse_databases(&names).map_err(PyValueError::new_err)?;
        }
        let transport = build_transport(&source, config.provider_timeout())
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        let runtime = tokio::runtime::Builder::new_multi_thread()
            .enable_all()
            .build()
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(PyResolver {
            inner: Resolver::new(transport, config),
            runtime,
        })
    }

    #[getter]
    fn mode(&self) -> String {
        format!("{:?}", self.inner.mode()).to_lowercase()
    }

    #[pyo3(signature = (id, tex_escape=false))]
    fn resolve(&self, py: Python<'_>, id: &str, tex_escape: bool) -> PyResult<Resolution> {
        let options = BibTexOptions { tex_escape };
        let response = py
            .detach(|| self.runtime.block_on(self.inner.resolve_response(id, options)))
            .map_err(resolve_error)?;
        Ok(Resolution { response })
    }
}

#[pymodule]
fn arxres(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(normalize_id, m)?)?;
    m.add_function(wrap_pyfunction!(levenshtein, m)?)?;
    m.add_function(wrap_pyfunction!(title_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(author_ratio, m)?)?;
    m.add_class::<PyResolver>()?;
    m.add_class::<Resolution>()?;
    m.add("UpstreamError", m.py().get_type::<UpstreamError>())?;
    m.add("DATABASES", SourceDatabase::ALL.map(|db| db.as_str()).to_vec())?;
    Ok(())
}
