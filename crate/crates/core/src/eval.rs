//! Evaluation harness: snapshot statistics, sampling, bulk resolution.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::time::Duration;

use chrono::{DateTime, Datelike, NaiveDate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::id::normalize_arxiv_input;
use crate::model::SourceDatabase;
use crate::pipeline::Resolver;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("only {eligible} eligible preprints, {requested} requested")]
    PopulationTooSmall { eligible: usize, requested: usize },
    #[error("unknown research field {0:?}")]
    UnknownField(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionEntry {
    pub version: String,
    pub created: String,
}

/// One line of the public arXiv metadata dump. Only the fields the harness
/// reads are kept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub id: String,
    #[serde(default)]
    pub categories: String,
    #[serde(default)]
    pub doi: Option<String>,
    #[serde(default, rename = "journal-ref")]
    pub journal_ref: Option<String>,
    #[serde(default)]
    pub versions: Vec<VersionEntry>,
}

fn present(v: &Option<String>) -> bool {
    v.as_deref().is_some_and(|s| !s.trim().is_empty())
}

impl SnapshotRecord {
    pub fn primary_category(&self) -> &str {
        self.categories.split_whitespace().next().unwrap_or("")
    }

    /// Publication information is a DOI or a journal reference.
    pub fn has_publication_info(&self) -> bool {
        present(&self.doi) || present(&self.journal_ref)
    }

    pub fn first_submission(&self) -> Option<NaiveDate> {
        let first = self
            .versions
            .iter()
            .find(|v| v.version == "v1")
            .or(self.versions.first())?;
        DateTime::parse_from_rfc2822(first.created.trim())
            .ok()
            .map(|d| d.date_naive())
    }
}

pub const FIELDS: [&str; 8] = [
    "Physics",
    "Mathematics",
    "Computer Science",
    "Quantitative Biology",
    "Quantitative Finance",
    "Statistics",
    "Electrical Engineering and Systems Science",
    "Economics",
];

pub const OTHER_FIELD: &str = "Other";

// Archives that predate the current taxonomy, with the field arXiv lists
// them under today.
const LEGACY_ARCHIVES: [(&str, &str); 18] = [
    ("cmp-lg", "Computer Science"),
    ("alg-geom", "Mathematics"),
    ("dg-ga", "Mathematics"),
    ("funct-an", "Mathematics"),
    ("q-alg", "Mathematics"),
    ("adap-org", "Physics"),
    ("chao-dyn", "Physics"),
    ("comp-gas", "Physics"),
    ("patt-sol", "Physics"),
    ("solv-int", "Physics"),
    ("acc-phys", "Physics"),
    ("ao-sci", "Physics"),
    ("atom-ph", "Physics"),
    ("bayes-an", "Physics"),
    ("chem-ph", "Physics"),
    ("mtrl-th", "Physics"),
    ("plasm-ph", "Physics"),
    ("supr-con", "Physics"),
];

/// Research field of an arXiv category such as `cs.LG` or `hep-th`.
pub fn research_field(category: &str) -> &'static str {
    let archive = category.split('.').next().unwrap_or("").to_ascii_lowercase();
    match archive.as_str() {
        "cs" => "Computer Science",
        "math" => "Mathematics",
        "q-bio" => "Quantitative Biology",
        "q-fin" => "Quantitative Finance",
        "stat" => "Statistics",
        "eess" => "Electrical Engineering and Systems Science",
        "econ" => "Economics",
        "astro-ph" | "cond-mat" | "gr-qc" | "math-ph" | "nlin" | "physics" | "quant-ph" => "Physics",
        a if a.starts_with("hep-") || a.starts_with("nucl-") => "Physics",
        a => LEGACY_ARCHIVES
            .iter()
            .find(|(name, _)| *name == a)
            .map_or(OTHER_FIELD, |(_, field)| field),
    }
}

/// Accepts a field name or an archive prefix ("cs").
pub fn resolve_field_name(name: &str) -> Result<&'static str, EvalError> {
    if let Some(f) = FIELDS.iter().find(|f| f.eq_ignore_ascii_case(name.trim())) {
        return Ok(f);
    }
    match research_field(name.trim()) {
        OTHER_FIELD => Err(EvalError::UnknownField(name.to_string())),
        f => Ok(f),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldStats {
    pub preprint_count: u64,
    pub count_without_publication_info: u64,
    pub version_total: u64,
}

impl FieldStats {
    fn add(&mut self, r: &SnapshotRecord) {
        self.preprint_count += 1;
        if !r.has_publication_info() {
            self.count_without_publication_info += 1;
        }
        self.version_total += r.versions.len() as u64;
    }

    pub fn merge(&mut self, other: &FieldStats) {
        self.preprint_count += other.preprint_count;
        self.count_without_publication_info += other.count_without_publication_info;
        self.version_total += other.version_total;
    }

    pub fn ratio_without_info(&self) -> f64 {
        if self.preprint_count == 0 {
            0.0
        } else {
            self.count_without_publication_info as f64 / self.preprint_count as f64
        }
    }

    pub fn mean_version_count(&self) -> f64 {
        if self.preprint_count == 0 {
            0.0
        } else {
            self.version_total as f64 / self.preprint_count as f64
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SnapshotStats {
    pub per_field: BTreeMap<String, FieldStats>,
    pub overall: FieldStats,
    /// Lines that did not parse as a record.
    pub malformed: u64,
}

impl SnapshotStats {
    pub fn add(&mut self, r: &SnapshotRecord) {
        let field = research_field(r.primary_category());
        self.per_field.entry(field.to_string()).or_default().add(r);
        self.overall.add(r);
    }

    pub fn field(&self, name: &str) -> FieldStats {
        self.per_field.get(name).copied().unwrap_or_default()
    }
}

/// Reads a line-delimited snapshot, calling `f` for every parseable record.
/// Returns the number of malformed lines.
pub fn for_each_record<R: BufRead>(
    reader: R,
    mut f: impl FnMut(SnapshotRecord),
) -> Result<u64, EvalError> {
    let mut malformed = 0;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<SnapshotRecord>(&line) {
            Ok(r) => f(r),
            Err(e) => {
                tracing::warn!("skipping malformed snapshot line: {e}");
                malformed += 1;
            }
        }
    }
    Ok(malformed)
}

pub fn compute_snapshot_stats<R: BufRead>(reader: R) -> Result<SnapshotStats, EvalError> {
    let mut stats = SnapshotStats::default();
    stats.malformed = for_each_record(reader, |r| stats.add(&r))?;
    Ok(stats)
}

/// Draws `n` ids without replacement from the preprints of `field` that lack
/// publication information and were first submitted before `before`.
pub fn sample_subset<R: BufRead>(
    reader: R,
    field: &str,
    before: NaiveDate,
    n: usize,
    seed: u64,
) -> Result<Vec<String>, EvalError> {
    let field = resolve_field_name(field)?;
    let mut eligible = Vec::new();
    for_each_record(reader, |r| {
        let ok = research_field(r.primary_category()) == field
            && !r.has_publication_info()
            && r.first_submission().is_some_and(|d| d < before);
        if ok {
            eligible.push(r.id);
        }
    })?;
    eligible.sort();
    eligible.dedup();
    if n > eligible.len() {
        return Err(EvalError::PopulationTooSmall {
            eligible: eligible.len(),
            requested: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<usize> = rand::seq::index::sample(&mut rng, eligible.len(), n).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| eligible[i].clone()).collect())
}

/// Venn cell bit of a database: DBLP=1, CrossRef=2, Semantic Scholar=4,
/// OpenAlex=8.
pub fn venn_bit(db: SourceDatabase) -> u8 {
    1 << db.index()
}

pub fn venn_mask(dbs: &[SourceDatabase]) -> u8 {
    dbs.iter().fold(0, |m, db| m | venn_bit(*db))
}

pub fn venn_label(mask: u8) -> String {
    SourceDatabase::ALL
        .iter()
        .filter(|db| mask & venn_bit(**db) != 0)
        .map(|db| db.as_str())
        .collect::<Vec<_>>()
        .join("+")
}

/// Submission year from a new-style (`YYMM.NNNNN`) or old-style
/// (`archive/YYMMNNN`) identifier.
pub fn year_from_id(id: &str) -> Option<i32> {
    let digits = id.rsplit('/').next()?;
    let yy: i32 = digits.get(..2)?.parse().ok()?;
    Some(if yy >= 91 { 1900 + yy } else { 2000 + yy })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BulkOutcome {
    pub id: String,
    pub year: Option<i32>,
    pub resolved_by: Vec<SourceDatabase>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearStats {
    pub sample_count: u64,
    pub resolved_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BulkRunSummary {
    pub sample_size: u64,
    pub overall_resolved: u64,
    pub per_database_resolved: BTreeMap<SourceDatabase, u64>,
    pub per_year: BTreeMap<i32, YearStats>,
    /// All 15 non-empty database subsets, keyed by bitmask.
    pub venn: BTreeMap<u8, u64>,
    pub failures: Vec<(String, String)>,
}

impl BulkRunSummary {
    pub fn from_outcomes(outcomes: &[BulkOutcome]) -> Self {
        let mut s = BulkRunSummary {
            sample_size: outcomes.len() as u64,
            overall_resolved: 0,
            per_database_resolved: SourceDatabase::ALL.iter().map(|&db| (db, 0)).collect(),
            per_year: BTreeMap::new(),
            venn: (1..16).map(|m| (m, 0)).collect(),
            failures: Vec::new(),
        };
        for o in outcomes {
            let resolved = !o.resolved_by.is_empty();
            if let Some(year) = o.year {
                let y = s.per_year.entry(year).or_default();
                y.sample_count += 1;
                y.resolved_count += u64::from(resolved);
            }
            if let Some(e) = &o.error {
                s.failures.push((o.id.clone(), e.clone()));
            }
            if !resolved {
                continue;
            }
            s.overall_resolved += 1;
            for db in &o.resolved_by {
                *s.per_database_resolved.entry(*db).or_default() += 1;
            }
            *s.venn.entry(venn_mask(&o.resolved_by)).or_default() += 1;
        }
        s
    }

    pub fn venn_cell(&self, dbs: &[SourceDatabase]) -> u64 {
        self.venn.get(&venn_mask(dbs)).copied().unwrap_or(0)
    }

    /// Consistency between the Venn cells and the other counts.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.overall_resolved > self.sample_size {
            return Err("overall_resolved exceeds sample_size".into());
        }
        let cells: u64 = self.venn.values().sum();
        if cells != self.overall_resolved {
            return Err(format!("venn cells sum to {cells}, overall_resolved is {}", self.overall_resolved));
        }
        for db in SourceDatabase::ALL {
            let from_cells: u64 = self
                .venn
                .iter()
                .filter(|(m, _)| **m & venn_bit(db) != 0)
                .map(|(_, c)| c)
                .sum();
            let direct = self.per_database_resolved.get(&db).copied().unwrap_or(0);
            if from_cells != direct {
                return Err(format!("{db:?}: venn cells give {from_cells}, count is {direct}"));
            }
        }
        Ok(())
    }
}

/// Resolves each id in turn, waiting `delay` between ids.
pub async fn bulk_resolve(
    resolver: &Resolver,
    ids: &[String],
    delay: Duration,
) -> (BulkRunSummary, Vec<BulkOutcome>) {
    let mut outcomes = Vec::with_capacity(ids.len());
    for (i, raw) in ids.iter().enumerate() {
        if i > 0 && !delay.is_zero() {
            tokio::time::sleep(delay).await;
        }
        let id_year = normalize_arxiv_input(raw)
            .ok()
            .and_then(|id| year_from_id(id.normalized()));
        let outcome = match resolver.resolve_id(raw).await {
            Ok(r) => BulkOutcome {
                id: r.report.preprint.id.normalized().to_string(),
                year: Some(r.report.preprint.published_date.year()),
                resolved_by: r.report.resolving_databases(),
                error: None,
            },
            Err(e) => BulkOutcome {
                id: raw.clone(),
                year: id_year,
                resolved_by: Vec::new(),
                error: Some(e.to_string()),
            },
        };
        outcomes.push(outcome);
    }
    (BulkRunSummary::from_outcomes(&outcomes), outcomes)
}

pub fn write_stats_csv<W: Write>(stats: &SnapshotStats, out: W) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["field", "count", "count_without_info", "ratio", "mean_versions"])?;
    let mut rows: Vec<(&str, FieldStats)> = FIELDS.iter().map(|f| (*f, stats.field(f))).collect();
    if let Some(other) = stats.per_field.get(OTHER_FIELD) {
        rows.push((OTHER_FIELD, *other));
    }
    rows.push(("Overall", stats.overall));
    for (name, s) in rows {
        w.write_record([
            name.to_string(),
            s.preprint_count.to_string(),
            s.count_without_publication_info.to_string(),
            format!("{:.4}", s.ratio_without_info()),
            format!("{:.2}", s.mean_version_count()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn ratio(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

pub fn write_summary_csv<W: Write>(s: &BulkRunSummary, out: W) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["database", "resolved", "ratio"])?;
    for (db, n) in &s.per_database_resolved {
        w.write_record([db.as_str().to_string(), n.to_string(), format!("{:.4}", ratio(*n, s.sample_size))])?;
    }
    w.write_record([
        "OVERALL".to_string(),
        s.overall_resolved.to_string(),
        format!("{:.4}", ratio(s.overall_resolved, s.sample_size)),
    ])?;
    w.flush()?;
    Ok(())
}

pub fn write_venn_csv<W: Write>(s: &BulkRunSummary, out: W) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["subset", "databases", "count"])?;
    for (mask, n) in &s.venn {
        w.write_record([mask.to_string(), venn_label(*mask), n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_per_year_csv<W: Write>(s: &BulkRunSummary, out: W) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["year", "sample_count", "resolved_count", "ratio"])?;
    for (year, y) in &s.per_year {
        w.write_record([
            year.to_string(),
            y.sample_count.to_string(),
            y.resolved_count.to_string(),
            format!("{:.4}", ratio(y.resolved_count, y.sample_count)),
        ])?;
    }
    w.flush()?;
    Ok(())
}
