//! Command-line front end: argument parsing, the output document, the
//! persistent memo cache and the self-test suites.
//!
//! Exit codes: 0 on success, 1 on an internal inconsistency or I/O failure,
//! 2 on invalid arguments.

pub mod cache;
pub mod output;
pub mod selftest;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use higgsmot_core::{higgs, ChainInvariants, CurveContext, Engine, Error, Rational, Series, StabilityParameter};

use cache::MemoCache;
use output::{BreakdownRow, CacheStats, Format, OutputDocument, Request, SeriesRecord};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Overrides `--cache-dir`.
pub const CACHE_ENV: &str = "HIGGSMOT_CACHE";

#[derive(Debug, Parser)]
#[command(name = "higgsmot", version, about = "Exact Poincaré series of Higgs and chain moduli on a curve")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Series of the moduli space (or stack) of semistable Higgs bundles.
    Higgs(HiggsArgs),
    /// Series of the stack of α-semistable chains.
    Chains(ChainsArgs),
    /// Series of the stack of semistable vector bundles.
    Bunss(BunssArgs),
    /// Runs built-in consistency checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub genus: u32,
    /// Truncation order N: coefficients of v^0 .. v^N.
    #[arg(long)]
    pub precision: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HiggsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub rank: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub degree: i64,
    /// The stack instead of the coarse space.
    #[arg(long)]
    pub stack: bool,
    /// Per-component rows.
    #[arg(long)]
    pub breakdown: bool,
}

#[derive(Debug, Args)]
pub struct ChainsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',', required = true)]
    pub ranks: Vec<i64>,
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub degrees: Vec<i64>,
    /// Entries `p/q` or integers.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub alpha: Vec<String>,
}

#[derive(Debug, Args)]
pub struct BunssArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub rank: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub degree: i64,
    /// Strip the `BGm` factor to get the coarse space.
    #[arg(long)]
    pub coarse: bool,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: selftest::Suite,
}

/// Failures carried to the exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Internal(_) => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) | Error::NonInvertible | Error::DivergentZeta(_) | Error::Unbounded(_) => {
                Failure::Internal(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

/// Resolved cache directory: the environment wins over the flag.
fn cache_dir(flag: &Option<PathBuf>) -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or_else(|| flag.clone())
}

fn engine(common: &Common) -> Result<Engine, Failure> {
    Ok(Engine::new(CurveContext::new(common.genus, common.precision))?)
}

/// Runs `compute` against an engine seeded from and flushed to the cache.
fn with_cache<T>(
    common: &Common,
    compute: impl FnOnce(&Engine) -> Result<T, Failure>,
) -> Result<(T, CacheStats), Failure> {
    let e = engine(common)?;
    let cache = cache_dir(&common.cache_dir).map(|d| MemoCache::new(&d, common.genus, common.precision));
    let mut stats = CacheStats::default();
    if let Some(c) = &cache {
        stats.enabled = true;
        stats.loaded = c.load_into(&e)?;
    }
    let out = compute(&e)?;
    if let Some(c) = &cache {
        stats.stored = c.store_from(&e)?;
    }
    let s = e.stats();
    stats.hits = s.hits;
    stats.misses = s.misses;
    Ok((out, stats))
}

fn document(request: Request, series: &Series, breakdown: Option<Vec<BreakdownRow>>, cache: CacheStats) -> OutputDocument {
    OutputDocument {
        version: VERSION.to_string(),
        request,
        series: SeriesRecord::new(series),
        breakdown,
        cache,
    }
}

fn parse_rational(s: &str) -> Result<Rational, Failure> {
    let bad = || Failure::Usage(format!("bad rational {s:?}: expected p/q or an integer"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?),
        None => (s.trim().parse().map_err(|_| bad())?, 1.into()),
    };
    if q == 0.into() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

pub fn run_higgs(a: &HiggsArgs) -> Result<OutputDocument, Failure> {
    let ((series, rows), cache) = with_cache(&a.common, |e| {
        let (space, rows) = if a.breakdown {
            let (s, rows) = higgs::higgs_space_with_breakdown(e, a.rank, a.degree)?;
            (s, Some(rows.iter().map(BreakdownRow::new).collect()))
        } else {
            (higgs::higgs_space_series(e, a.rank, a.degree)?, None)
        };
        let series = if a.stack { &space * &e.context().bgm_class() } else { space };
        Ok((series, rows))
    })?;
    let request = Request::Higgs {
        genus: a.common.genus,
        rank: a.rank,
        degree: a.degree,
        precision: a.common.precision,
        stack: a.stack,
    };
    Ok(document(request, &series, rows, cache))
}

pub fn run_chains(a: &ChainsArgs) -> Result<OutputDocument, Failure> {
    let inv = ChainInvariants::new(a.ranks.clone(), a.degrees.clone())?;
    let alpha = StabilityParameter::new(a.alpha.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?)?;
    let (series, cache) = with_cache(&a.common, |e| Ok(e.ss_stack_class(&inv, &alpha)?))?;
    let request = Request::Chains {
        genus: a.common.genus,
        ranks: a.ranks.clone(),
        degrees: a.degrees.clone(),
        alpha: alpha.values().iter().map(Rational::to_string).collect(),
        precision: a.common.precision,
    };
    Ok(document(request, &series, None, cache))
}

pub fn run_bunss(a: &BunssArgs) -> Result<OutputDocument, Failure> {
    let inv = ChainInvariants::bundle(a.rank, a.degree)?;
    let alpha = StabilityParameter::from_ints(&[0])?;
    let (series, cache) = with_cache(&a.common, |e| {
        let s = e.ss_stack_class(&inv, &alpha)?;
        Ok(if a.coarse { &s * &e.context().gerbe_strip() } else { s })
    })?;
    let request = Request::Bunss {
        genus: a.common.genus,
        rank: a.rank,
        degree: a.degree,
        precision: a.common.precision,
        coarse: a.coarse,
    };
    Ok(document(request, &series, None, cache))
}

fn emit(doc: Result<OutputDocument, Failure>, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    out.write_all(doc?.render(format).as_bytes())?;
    Ok(())
}

/// Executes a parsed command and returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Higgs(a) => emit(run_higgs(a), a.common.format, out),
        Command::Chains(a) => emit(run_chains(a), a.common.format, out),
        Command::Bunss(a) => emit(run_bunss(a), a.common.format, out),
        Command::Selftest(a) => match selftest::run(a.suite, out) {
            Ok(true) => Ok(()),
            Ok(false) => return 1,
            Err(e) => Err(e.into()),
        },
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "higgsmot: {f}");
            f.exit_code()
        }
    }
}

/// Parses `argv` and runs it; argument errors exit with 2.
pub fn main_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            code
        }
    }
}
