//! Argument parsing, command dispatch and exit codes.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::fasta::{FastaError, Policy, SymbolMap};
use crate::{analyze, pmf, simulate, verify};

pub const UNIFORM: &str = "1/4,1/4,1/4,1/4";

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] runlab::Error),
    #[error(transparent)]
    Fasta(#[from] FastaError),
    #[error("{path}: {source}")]
    File { path: String, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

impl AppError {
    /// 2 for invalid input, 3 for an exceeded engine cap, 4 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(runlab::Error::CapExceeded { .. }) => 3,
            AppError::Core(_) | AppError::Usage(_) => 2,
            AppError::Fasta(FastaError::Io(_)) => 4,
            AppError::Fasta(_) => 2,
            AppError::File { .. } | AppError::Io(_) | AppError::Csv(_) | AppError::Json(_) => 4,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;

#[derive(Debug, Parser)]
#[command(name = "runlab", version, about = "Exact distributions of runs in four-state trials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact PMF of one run statistic.
    Pmf(PmfArgs),
    /// Run statistics of FASTA records, with optional model tail probabilities.
    Analyze(AnalyzeArgs),
    /// Simulated sequences, or the empirical PMF of a statistic.
    Simulate(SimulateArgs),
    /// Cross-check the closed forms against the exhaustive and DP oracles.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StatArg {
    Nonoverlapping,
    Exact,
    WaitingFirst,
    WaitingRth,
    Longest,
    Shortest,
    JointLongest,
    JointShortest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Theorem,
    Collapse,
    Dp,
    Exhaustive,
}

impl From<EngineArg> for runlab::Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Theorem => runlab::Engine::Theorem,
            EngineArg::Collapse => runlab::Engine::Collapse,
            EngineArg::Dp => runlab::Engine::Dp,
            EngineArg::Exhaustive => runlab::Engine::Exhaustive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct PmfArgs {
    #[arg(long, value_enum)]
    pub stat: StatArg,
    /// Number of trials (fixed-horizon statistics).
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub r: Option<u64>,
    /// Truncation horizon (waiting times).
    #[arg(long = "n-max")]
    pub n_max: Option<u64>,
    /// P_a,P_b,P_c,P_d as exact rationals.
    #[arg(long, default_value = UNIFORM)]
    pub probs: String,
    /// Defaults to collapse for scalar statistics above 25 trials, theorem otherwise.
    #[arg(long, value_enum)]
    pub engine: Option<EngineArg>,
    /// Evaluate the per-variable sums (n <= 12).
    #[arg(long, conflicts_with = "engine")]
    pub raw_sums: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// FASTA file, or `-` for standard input.
    #[arg(long)]
    pub input: PathBuf,
    /// `ABCD`-permutation giving the states of A, C, G, T, or `states` for
    /// input already written over A, B, C, D.
    #[arg(long, default_value = "ABCD")]
    pub map: SymbolMap,
    #[arg(long, default_value = "strict")]
    pub policy: Policy,
    /// Largest run order reported (defaults to the longest run).
    #[arg(long = "k-max")]
    pub k_max: Option<u64>,
    /// Add exact model probabilities of runs at least as extreme as observed.
    #[arg(long)]
    pub tails: bool,
    /// Model probabilities for the tails; estimated per record when absent.
    #[arg(long)]
    pub probs: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Sequence length (the horizon for waiting times).
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value = UNIFORM)]
    pub probs: String,
    #[arg(long, default_value_t = 1)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tabulate this statistic instead of printing sequences.
    #[arg(long, value_enum)]
    pub stat: Option<StatArg>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub r: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GridPoint {
    Uniform,
    TwoState,
    Skewed,
}

impl GridPoint {
    pub fn name(self) -> &'static str {
        match self {
            GridPoint::Uniform => "uniform",
            GridPoint::TwoState => "two-state",
            GridPoint::Skewed => "skewed",
        }
    }

    pub fn probs(self) -> runlab::StateProbabilities {
        let text = match self {
            GridPoint::Uniform => UNIFORM,
            GridPoint::TwoState => "1/2,1/2,0,0",
            GridPoint::Skewed => "1/6,1/2,1/6,1/6",
        };
        text.parse().expect("grid vectors are valid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long = "n-max", default_value_t = 8)]
    pub n_max: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["uniform", "two-state", "skewed"])]
    pub grid: Vec<GridPoint>,
    /// Evaluate exact-length runs with the literal (P_b/P_d) factor, to show
    /// the check catches it.
    #[arg(long)]
    pub inject_typo: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: VerifyFormat,
}

pub fn stat_kind(stat: StatArg, k: Option<u64>, r: Option<u64>) -> AppResult<runlab::StatisticKind> {
    use runlab::StatisticKind as K;
    let need_k = || k.ok_or_else(|| AppError::Usage(format!("--k is required for {stat:?}")));
    let kind = match stat {
        StatArg::Nonoverlapping => K::Nonoverlapping { k: need_k()? },
        StatArg::Exact => K::ExactLength { k: need_k()? },
        StatArg::WaitingFirst => K::WaitingFirst { k: need_k()? },
        StatArg::WaitingRth => K::WaitingRth {
            k: need_k()?,
            r: r.ok_or_else(|| AppError::Usage("--r is required for waiting-rth".into()))?,
        },
        StatArg::Longest => K::Longest,
        StatArg::Shortest => K::Shortest,
        StatArg::JointLongest => K::JointLongest,
        StatArg::JointShortest => K::JointShortest,
    };
    if kind.k().is_none() && k.is_some() {
        return Err(AppError::Usage(format!("--k does not apply to {}", kind.name())));
    }
    if !matches!(kind, K::WaitingRth { .. }) && r.is_some() {
        return Err(AppError::Usage(format!("--r does not apply to {}", kind.name())));
    }
    Ok(kind)
}

pub fn open_input(path: &PathBuf) -> AppResult<Box<dyn io::BufRead>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let file = File::open(path).map_err(|source| AppError::File {
        path: path.display().to_string(),
        source,
    })?;
    Ok(Box::new(BufReader::new(file)))
}

/// Runs one command, writing its report to `out`; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> AppResult<i32> {
    match cli.command {
        Command::Pmf(a) => pmf::run(a, out).map(|_| 0),
        Command::Analyze(a) => analyze::run(a, out).map(|_| 0),
        Command::Simulate(a) => simulate::run(a, out).map(|_| 0),
        Command::Verify(a) => verify::run(a, out),
    }
}

pub fn write_json<T: serde::Serialize>(value: &T, out: &mut dyn Write) -> AppResult<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}
