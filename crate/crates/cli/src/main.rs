//! `arxres`: resolve arXiv preprints from the shell, serve the HTTP API, and
//! run the evaluation harness.

mod report;

use std::fs::File;
use std::io::{self, BufReader, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use arxres_core::bibtex::BibTexOptions;
use arxres_core::eval::{
    bulk_resolve, compute_snapshot_stats, sample_subset, write_per_year_csv, write_stats_csv,
    write_summary_csv, write_venn_csv,
};
use arxres_core::http::{build_transport, TransportSource};
use arxres_core::{MatchThresholds, Resolver, ResolverConfig, SourceDatabase};
use arxres_server::{AppConfig, AppState};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

const EXIT_RESOLVED: u8 = 0;
const EXIT_UNRESOLVED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_UPSTREAM: u8 = 3;

#[derive(Parser)]
#[command(name = "arxres", version, about = "Find the published versions of arXiv preprints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve one arXiv id or URL.
    Resolve(ResolveArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Per-field statistics of a metadata snapshot (CSV on stdout).
    Stats {
        snapshot: PathBuf,
    },
    /// Draw a seeded sample of unpublished preprints from a snapshot.
    Sample(SampleArgs),
    /// Resolve a list of ids and write summary CSVs.
    Bulk(BulkArgs),
}

#[derive(Args)]
struct Upstream {
    /// Replay recorded responses from this directory instead of the network.
    #[arg(long, value_name = "DIR", conflicts_with = "record")]
    fixtures: Option<PathBuf>,
    /// Query live and write every response into this directory.
    #[arg(long, value_name = "DIR")]
    record: Option<PathBuf>,
    /// TOML configuration file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

impl Upstream {
    fn source(&self) -> TransportSource {
        match (&self.fixtures, &self.record) {
            (Some(dir), _) => TransportSource::Replay(dir.clone()),
            (None, Some(dir)) => TransportSource::Record(dir.clone()),
            (None, None) => TransportSource::Live,
        }
    }
}

#[derive(Args)]
struct ResolveArgs {
    id: String,
    #[command(flatten)]
    upstream: Upstream,
    /// Print the full result as JSON.
    #[arg(long, conflicts_with = "bibtex")]
    json: bool,
    /// Print only BibTeX for the accepted candidates.
    #[arg(long)]
    bibtex: bool,
    /// Write accented letters as TeX commands.
    #[arg(long)]
    tex_escape: bool,
    /// Accept titles whose edit-distance ratio is below this [default: 0.05]
    #[arg(long, value_name = "RATIO")]
    title_ratio: Option<f64>,
    /// Accept author lists whose surname overlap exceeds this [default: 0.70]
    #[arg(long, value_name = "RATIO")]
    author_ratio: Option<f64>,
    /// Overall time budget in seconds.
    #[arg(long, value_name = "SECS")]
    timeout: Option<f64>,
    /// Only query these databases (dblp, crossref, s2, openalex).
    #[arg(long, value_name = "NAMES", value_delimiter = ',')]
    db: Vec<String>,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    upstream: Upstream,
    #[arg(long)]
    host: Option<String>,
    #[arg(long)]
    port: Option<u16>,
    /// Directory with the built web UI.
    #[arg(long, value_name = "DIR")]
    ui_dir: Option<PathBuf>,
    /// Resolutions per minute and client; 0 disables the limit.
    #[arg(long)]
    rate_limit: Option<u32>,
}

#[derive(Args)]
struct SampleArgs {
    snapshot: PathBuf,
    /// Field name or archive prefix, e.g. "Computer Science" or "cs".
    #[arg(long, default_value = "cs")]
    field: String,
    /// Only preprints first submitted before this date.
    #[arg(long, default_value = "2022-01-01")]
    before: NaiveDate,
    #[arg(long, short, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BulkArgs {
    /// File with one arXiv id per line.
    ids: PathBuf,
    #[command(flatten)]
    upstream: Upstream,
    /// Pause between ids; defaults to 1000 live and 0 in replay.
    #[arg(long, value_name = "MS")]
    delay_ms: Option<u64>,
    /// Where summary.csv, venn.csv and per_year.csv go.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
}

/// Failure before any resolution happened.
struct Fatal(u8, String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(EXIT_INPUT, e.to_string())
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_writer(io::stderr)
        .with_ansi(io::stderr().is_terminal())
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_env("ARXRES_LOG")
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .init();
    let cli = Cli::parse();
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_UPSTREAM);
        }
    };
    let result = runtime.block_on(async {
        match cli.command {
            Command::Resolve(args) => resolve(args).await,
            Command::Serve(args) => serve(args).await,
            Command::Stats { snapshot } => stats(&snapshot),
            Command::Sample(args) => sample(args),
            Command::Bulk(args) => bulk(args).await,
        }
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Fatal(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<AppConfig, Fatal> {
    Ok(AppConfig::load_with_env(path)?)
}

fn build_resolver(upstream: &Upstream, config: ResolverConfig) -> Result<Resolver, Fatal> {
    let transport = build_transport(&upstream.source(), config.provider_timeout())?;
    Ok(Resolver::new(transport, config))
}

async fn resolve(args: ResolveArgs) -> Result<u8, Fatal> {
    let mut config = load_config(args.upstream.config.as_deref())?.resolver;
    if args.upstream.fixtures.is_some() {
        config.retry_base_delay_ms = 0;
        config.rate_limit_retry_delay_ms = 0;
    }
    config.thresholds = MatchThresholds::new(
        args.title_ratio.unwrap_or(config.thresholds.title_ratio_max),
        args.author_ratio.unwrap_or(config.thresholds.author_ratio_min),
    )?;
    if let Some(secs) = args.timeout {
        if !(secs > 0.0 && secs.is_finite()) {
            return Err(Fatal(EXIT_INPUT, format!("--timeout must be positive, got {secs}")));
        }
        config.resolution_budget_ms = (secs * 1000.0).round() as u64;
        config.provider_timeout_ms = config.provider_timeout_ms.min(config.resolution_budget_ms);
    }
    if !args.db.is_empty() {
        config.databases = args
            .db
            .iter()
            .map(|name| {
                SourceDatabase::from_name(name)
                    .ok_or_else(|| Fatal(EXIT_INPUT, format!("unknown database {name:?}")))
            })
            .collect::<Result<_, _>>()?;
    }
    let resolver = build_resolver(&args.upstream, config)?;
    let options = BibTexOptions {
        tex_escape: args.tex_escape,
    };
    let response = match resolver.resolve_response(&args.id, options).await {
        Ok(r) => r,
        Err(e) => return Err(Fatal(e.exit_code() as u8, e.to_string())),
    };
    let mut out = io::stdout().lock();
    let written = if args.json {
        serde_json::to_writer(&mut out, &response)
            .map_err(io::Error::from)
            .and_then(|_| writeln!(out))
    } else if args.bibtex {
        write!(out, "{}", response.bibtex())
    } else {
        write!(out, "{}", report::human(&response))
    };
    written.map_err(|e| Fatal(EXIT_UPSTREAM, e.to_string()))?;
    Ok(if response.resolved { EXIT_RESOLVED } else { EXIT_UNRESOLVED })
}

async fn serve(args: ServeArgs) -> Result<u8, Fatal> {
    let mut config = load_config(args.upstream.config.as_deref())?;
    let s = &mut config.server;
    if let Some(host) = args.host {
        s.host = host;
    }
    if let Some(port) = args.port {
        s.port = port;
    }
    if let Some(dir) = args.ui_dir {
        s.ui_dir = Some(dir);
    }
    if let Some(n) = args.rate_limit {
        s.rate_limit_per_minute = n;
    }
    let resolver = build_resolver(&args.upstream, config.resolver)?;
    let listener = arxres_server::bind(&config.server)
        .await
        .map_err(|e| Fatal(EXIT_UPSTREAM, format!("cannot listen on {}:{}: {e}", config.server.host, config.server.port)))?;
    let addr = listener.local_addr().map_err(|e| Fatal(EXIT_UPSTREAM, e.to_string()))?;
    eprintln!("listening on http://{addr} ({} mode)", resolver.mode().as_str());
    let state = Arc::new(AppState::new(resolver, config.server));
    arxres_server::serve(listener, state)
        .await
        .map_err(|e| Fatal(EXIT_UPSTREAM, e.to_string()))?;
    Ok(0)
}

fn open(path: &Path) -> Result<BufReader<File>, Fatal> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Fatal(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn stats(snapshot: &Path) -> Result<u8, Fatal> {
    let stats = compute_snapshot_stats(open(snapshot)?)?;
    if stats.malformed > 0 {
        eprintln!("skipped {} malformed lines", stats.malformed);
    }
    write_stats_csv(&stats, io::stdout().lock())?;
    Ok(0)
}

fn sample(args: SampleArgs) -> Result<u8, Fatal> {
    let ids = sample_subset(open(&args.snapshot)?, &args.field, args.before, args.n, args.seed)?;
    let mut out = io::stdout().lock();
    for id in ids {
        writeln!(out, "{id}")?;
    }
    Ok(0)
}

async fn bulk(args: BulkArgs) -> Result<u8, Fatal> {
    let text = std::fs::read_to_string(&args.ids)
        .map_err(|e| Fatal(EXIT_INPUT, format!("{}: {e}", args.ids.display())))?;
    let ids: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect();
    if ids.is_empty() {
        return Err(Fatal(EXIT_INPUT, "no ids to resolve".into()));
    }
    let mut config = load_config(args.upstream.config.as_deref())?.resolver;
    let replay = args.upstream.fixtures.is_some();
    if replay {
        config.retry_base_delay_ms = 0;
        config.rate_limit_retry_delay_ms = 0;
    }
    let delay = Duration::from_millis(args.delay_ms.unwrap_or(if replay { 0 } else { 1000 }));
    let resolver = build_resolver(&args.upstream, config)?;
    let (summary, outcomes) = bulk_resolve(&resolver, &ids, delay).await;
    if let Err(e) = summary.check_invariants() {
        return Err(Fatal(EXIT_UPSTREAM, format!("inconsistent summary: {e}")));
    }

    std::fs::create_dir_all(&args.out_dir)?;
    let create = |name: &str| {
        let path = args.out_dir.join(name);
        File::create(&path).map_err(|e| Fatal(EXIT_INPUT, format!("{}: {e}", path.display())))
    };
    write_summary_csv(&summary, create("summary.csv")?)?;
    write_venn_csv(&summary, create("venn.csv")?)?;
    write_per_year_csv(&summary, create("per_year.csv")?)?;
    let mut lines = create("outcomes.jsonl")?;
    for o in &outcomes {
        serde_json::to_writer(&mut lines, o)?;
        writeln!(lines)?;
    }

    println!(
        "resolved {} of {} ({:.1} %)",
        summary.overall_resolved,
        summary.sample_size,
        100.0 * summary.overall_resolved as f64 / summary.sample_size as f64
    );
    for (db, n) in &summary.per_database_resolved {
        println!("  {db:<20} {n}");
    }
    for (id, e) in &summary.failures {
        eprintln!("{id}: {e}");
    }
    Ok(0)
}
