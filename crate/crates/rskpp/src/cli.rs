//! The `rskpp` command line.
//!
//! Exit codes: 0 on success, 2 for usage, configuration and input errors,
//! 3 when the seeding itself fails (for example the safety cap is hit).

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rskpp_core::metrics::estimate_beta;
use rskpp_core::seeding::{Prepared, SeedingVariant};
use rskpp_core::{Error, RoundLimit, SeedingConfig, DEFAULT_SAFETY_CAP};
use thiserror::Error;

use crate::bench::{run_bench, write_csv, write_table, BenchPlan};
use crate::ingest::{self, Format, IngestError, IngestOptions};
use crate::runner::{preprocess_timed, run_timed};
use crate::synth::gaussian_mixture;

pub const SAFETY_CAP_ENV: &str = "RSKPP_SAFETY_CAP";

#[derive(Debug, Parser)]
#[command(name = "rskpp", version, about = "Fast k-means++ seeding by rejection sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one seeding and print the result as JSON.
    Seed(SeedArgs),
    /// Repeat seedings over a grid of k, m and variants and print CSV rows.
    Bench(BenchArgs),
    /// Estimate β = Δ₁ / E[cost] from repeated unbounded runs.
    EstimateBeta(BetaArgs),
    /// Write a planted Gaussian mixture to standard output.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "csv")]
    format: Format,
    #[arg(long)]
    skip_header: bool,
    /// Zero-based column to drop; repeatable.
    #[arg(long = "drop-col", value_name = "N")]
    drop_col: Vec<usize>,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
}

impl InputArgs {
    fn options(&self) -> Result<IngestOptions, CliError> {
        if !self.delimiter.is_ascii() {
            return Err(CliError::Usage("delimiter must be a single ASCII character".into()));
        }
        Ok(IngestOptions {
            format: self.format,
            skip_header: self.skip_header,
            drop_columns: self.drop_col.clone(),
            delimiter: self.delimiter as u8,
        })
    }
}

#[derive(Debug, Args)]
struct BudgetArgs {
    /// Rejection rounds per draw before falling back to a uniform pick.
    #[arg(long, conflicts_with = "unbounded")]
    m: Option<u64>,
    /// Retry until acceptance (the default).
    #[arg(long)]
    unbounded: bool,
    /// Multiply the round budget by ln k.
    #[arg(long)]
    scale_ln_k: bool,
    #[arg(long, default_value_t = 1.0)]
    c_mult: f64,
}

impl BudgetArgs {
    fn limit(&self) -> RoundLimit {
        self.m.map_or(RoundLimit::Unbounded, RoundLimit::Rounds)
    }
}

#[derive(Debug, Args)]
struct SeedArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, default_value = "rs", value_parser = parse_variant)]
    variant: SeedingVariant,
    /// Uniform mixing weight for the delta variant, in [0, 0.5).
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report zero for both timings so output is reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    pretty: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, required_unless_present = "k_list")]
    k: Option<usize>,
    #[arg(long, value_delimiter = ',', conflicts_with = "k")]
    k_list: Vec<usize>,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Round budgets for the rs variant, e.g. 5,10,unbounded.
    #[arg(long, value_delimiter = ',', value_parser = parse_limit)]
    m_list: Vec<RoundLimit>,
    /// One or more of rs, delta, exact, uniform.
    #[arg(long = "variant", value_delimiter = ',', default_value = "rs", value_parser = parse_variant)]
    variants: Vec<SeedingVariant>,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    repeats: usize,
    /// Dataset label for the output rows; defaults to the input file stem.
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    pretty: bool,
}

#[derive(Debug, Args)]
struct BetaArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 20)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    pretty: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    /// Half-width of the box the cluster means are drawn from.
    #[arg(long, default_value_t = 100.0)]
    spread: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "csv")]
    format: Format,
}

fn parse_limit(s: &str) -> Result<RoundLimit, String> {
    if s.eq_ignore_ascii_case("unbounded") {
        return Ok(RoundLimit::Unbounded);
    }
    s.parse::<u64>()
        .map(RoundLimit::Rounds)
        .map_err(|_| format!("`{s}` is neither a round count nor `unbounded`"))
}

fn parse_variant(s: &str) -> Result<SeedingVariant, String> {
    s.parse().map_err(|e| format!("{e}"))
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Seeding(#[from] Error),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(io::Error::other(e))
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Seeding(
                Error::SafetyCapExceeded(_) | Error::ZeroMass | Error::ZeroDenominator | Error::ZeroCost,
            ) => 3,
            CliError::Output(_) => 1,
            _ => 2,
        }
    }
}

pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rskpp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    let safety_cap = safety_cap()?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Seed(a) => seed(a, safety_cap, &mut out),
        Command::Bench(a) => bench(a, safety_cap, &mut out),
        Command::EstimateBeta(a) => beta(a, safety_cap, &mut out),
        Command::Synth(a) => synth(a, &mut out),
    }
}

fn safety_cap() -> Result<u64, CliError> {
    match std::env::var(SAFETY_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| CliError::Usage(format!("{SAFETY_CAP_ENV} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_SAFETY_CAP),
    }
}

fn load(input: &InputArgs) -> Result<(Prepared, f64), CliError> {
    let matrix = ingest::load(&input.input, &input.options()?)?;
    Ok(preprocess_timed(matrix.points, matrix.d)?)
}

fn base_config(k: usize, budget: &BudgetArgs, delta: f64, seed: u64, safety_cap: u64) -> SeedingConfig {
    SeedingConfig {
        k,
        m: budget.limit(),
        c_mult: budget.c_mult,
        scale_by_ln_k: budget.scale_ln_k,
        delta,
        rng_seed: seed,
        safety_cap,
    }
}

fn print_json<T: serde::Serialize>(value: &T, pretty: bool, out: &mut impl Write) -> Result<(), CliError> {
    let text = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .map_err(io::Error::other)?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn seed(a: SeedArgs, safety_cap: u64, out: &mut impl Write) -> Result<(), CliError> {
    let (prepared, pre_time) = load(&a.input)?;
    let cfg = base_config(a.k, &a.budget, a.delta, a.seed, safety_cap);
    cfg.validate(prepared.data.n())?;
    let mut result = run_timed(a.variant, &prepared, &cfg, pre_time)?;
    if a.no_timing {
        result.preprocess_time_s = 0.0;
        result.seeding_time_s = 0.0;
    }
    print_json(&result, a.pretty, out)
}

fn bench(a: BenchArgs, safety_cap: u64, out: &mut impl Write) -> Result<(), CliError> {
    if a.repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    let k_list = match a.k {
        Some(k) => vec![k],
        None => a.k_list.clone(),
    };
    let m_list = if a.m_list.is_empty() {
        vec![a.budget.limit()]
    } else {
        a.m_list.clone()
    };
    let dataset = a.name.clone().unwrap_or_else(|| {
        a.input
            .input
            .file_stem()
            .map_or_else(|| "data".into(), |s| s.to_string_lossy().into_owned())
    });
    let (prepared, mut pre_time) = load(&a.input)?;
    let base = base_config(1, &a.budget, a.delta, a.seed, safety_cap);
    for &k in &k_list {
        let mut cfg = base.clone();
        cfg.k = k;
        for &m in &m_list {
            cfg.m = m;
            cfg.validate(prepared.data.n())?;
        }
    }
    if a.repeats == 1 {
        eprintln!("rskpp: warning: --repeats 1 reports std_cost and ci95_cost as 0");
    }
    if a.no_timing {
        pre_time = 0.0;
    }
    let plan = BenchPlan {
        dataset,
        variants: a.variants.clone(),
        k_list,
        m_list,
        repeats: a.repeats,
        base,
    };
    let mut rows = run_bench(&prepared, &plan, pre_time)?;
    if a.no_timing {
        for r in &mut rows {
            r.mean_seed_time_s = 0.0;
        }
    }
    if a.pretty {
        write_table(&rows, out)?;
    } else {
        write_csv(&rows, out)?;
    }
    Ok(())
}

fn beta(a: BetaArgs, safety_cap: u64, out: &mut impl Write) -> Result<(), CliError> {
    let (prepared, _) = load(&a.input)?;
    SeedingConfig::new(a.k).validate(prepared.data.n())?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let estimate = estimate_beta(&prepared.data, &prepared.tree, a.k, a.repeats, safety_cap, &mut rng)?;
    print_json(&estimate, a.pretty, out)
}

fn synth(a: SynthArgs, out: &mut impl Write) -> Result<(), CliError> {
    if a.n == 0 || a.d == 0 || a.k == 0 {
        return Err(CliError::Usage("--n, --d and --k must be positive".into()));
    }
    if !(a.spread.is_finite() && a.spread >= 0.0 && a.sigma.is_finite() && a.sigma >= 0.0) {
        return Err(CliError::Usage("--spread and --sigma must be finite and nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let planted = gaussian_mixture(a.n, a.d, a.k, a.spread, a.sigma, &mut rng);
    let text = match a.format {
        Format::Csv => ingest::to_csv(&planted.points, planted.d),
        Format::Libsvm => ingest::to_libsvm(&planted.points, planted.d),
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}
