//! `gprace`: command-line driver for Gaussian prime race experiments.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gprace_core::Family;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "gprace", version, about = "Chebyshev-bias experiments for Gaussian primes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the D1/D2 races and write race.csv and signchanges.csv.
    Race(RaceArgs),
    /// Histogram the prime angles against equidistribution.
    Hist(HistArgs),
    /// Print conductors, root numbers and orders for a character family.
    Signs(SignsArgs),
    /// Print the mean of the limiting distribution for a test function.
    Mean(MeanArgs),
    /// Simulate the truncated limiting distribution from zero data.
    Dist(DistArgs),
    /// Write the normalized decomposition of every split prime.
    Decompose(DecomposeArgs),
}

#[derive(Debug, Args)]
struct SieveArgs {
    /// Largest integer sieved; accepts scientific notation such as 1e8.
    #[arg(long, value_parser = parse_limit)]
    limit: u64,
    /// Sieve segment length.
    #[arg(long, default_value_t = gprace_core::sieve::DEFAULT_SEGMENT_SIZE)]
    segment_size: u64,
    /// Directory receiving the output files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct RaceArgs {
    #[command(flatten)]
    sieve: SieveArgs,
    /// Ratio between consecutive checkpoints.
    #[arg(long, default_value_t = 1.01)]
    checkpoint_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AngleChoice {
    Theta,
    ThetaTilde,
    Both,
}

#[derive(Debug, Args)]
struct HistArgs {
    #[command(flatten)]
    sieve: SieveArgs,
    #[arg(long, default_value_t = 200)]
    bins: usize,
    /// Which angle to histogram: theta -> hist.csv, theta-tilde -> hist_tilde.csv.
    #[arg(long, value_enum, default_value_t = AngleChoice::Both)]
    angle: AngleChoice,
}

#[derive(Debug, Args)]
struct SignsArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long, default_value_t = 200)]
    max_m: u64,
    /// CSV family,m,ord_half replacing the rank hypothesis where listed.
    #[arg(long)]
    ranks: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PhiChoice {
    Phi1,
    Phi2,
}

#[derive(Debug, Args)]
struct PhiArgs {
    /// Built-in step function.
    #[arg(long, value_enum, conflicts_with = "coeffs")]
    phi: Option<PhiChoice>,
    /// CSV m,c_m of cosine coefficients.
    #[arg(long)]
    coeffs: Option<PathBuf>,
    /// Truncation of the cosine series [default: 10000, or the file's length with --coeffs].
    #[arg(long = "N")]
    n: Option<u64>,
}

#[derive(Debug, Args)]
struct MeanArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[command(flatten)]
    phi: PhiArgs,
    #[arg(long)]
    ranks: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DistArgs {
    /// CSV m,gamma,mult.
    #[arg(long)]
    zeros: PathBuf,
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[command(flatten)]
    phi: PhiArgs,
    /// Mean of the distribution; defaults to the family's mean value for the test function.
    #[arg(long, allow_hyphen_values = true)]
    mean: Option<f64>,
    /// Ignore zeros with gamma above this height.
    #[arg(long = "T")]
    t_max: Option<f64>,
    /// Ordinates closer than this are one point of the zero set.
    #[arg(long, default_value_t = gprace_core::zdist::DEFAULT_MERGE_TOL)]
    merge_tol: f64,
    /// Sample log x uniformly from [0, Y].
    #[arg(long = "Y", default_value_t = 1e6)]
    y_max: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 100)]
    bins: usize,
    #[arg(long)]
    ranks: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    #[command(flatten)]
    sieve: SieveArgs,
}

fn parse_limit(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if !(x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x <= (1u64 << 63) as f64) {
        return Err(format!("limit must be a non-negative integer up to 2^63, got {s}"));
    }
    Ok(x as u64)
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse()
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io { .. } => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<gprace_core::Error> for CliError {
    fn from(e: gprace_core::Error) -> Self {
        use gprace_core::Error as E;
        if e.is_internal() {
            return CliError::Internal(e.to_string());
        }
        match e {
            E::Io(source) => CliError::Io { path: PathBuf::new(), source },
            E::Hecke(gprace_core::hecke::HeckeError::Io(source)) | E::Zdist(gprace_core::zdist::ZdistError::Io(source)) => {
                CliError::Io { path: PathBuf::new(), source }
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Race(a) => commands::race(&a),
        Command::Hist(a) => commands::hist(&a),
        Command::Signs(a) => commands::signs(&a),
        Command::Mean(a) => commands::mean(&a),
        Command::Dist(a) => commands::dist(&a),
        Command::Decompose(a) => commands::decompose(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gprace: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
