//! Command-line front end for `harmonic_sieve`.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or parse error, 3 a size
//! limit was hit.

pub mod commands;
pub mod dsl;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use harmonic_sieve::error::Error;
use harmonic_sieve::multiregister::DEFAULT_GUARD;

pub const GUARD_ENV: &str = "HARMONIC_SIEVE_GUARD";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Resource(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Resource(m) => write!(f, "resource limit: {m}"),
            CliError::Numerical(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_resource() {
            return CliError::Resource(e.to_string());
        }
        match e {
            Error::Spec(_) | Error::Domain(_) | Error::Unsupported(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "harmonic-sieve", version, about = "Missing harmonics and multiregister Fourier measurements on small finite groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Order, elements and conjugacy classes.
    Group(GroupArgs),
    /// Character table as CSV.
    Chartable(GroupArgs),
    /// Missing harmonics of a subgroup and the sufficient conditions.
    Harmonics(SubgroupArgs),
    /// Rank decomposition of Reg(H) over every subgroup.
    RankAudit(GroupArgs),
    /// Per-subset projectors, span dimension and simulated measurement.
    Measure(MeasureArgs),
    /// Controlled G-action circuit versus the diagonal isotypic projector.
    Kickback(KickbackArgs),
    /// Every identity for one (group, subgroup, irreducible, k).
    Audit(AuditArgs),
    /// Span fraction against k.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    /// Group spec: Z:n, D:n, S:n, Z2^n, prod(a,b) or perm[...]
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SubgroupArgs {
    #[arg(long)]
    pub group: String,
    /// `trivial`, `all`, or comma-separated generator labels
    #[arg(long, default_value = "trivial")]
    pub subgroup: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Dense,
    Ensemble,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value = "trivial")]
    pub subgroup: String,
    /// Irreducible label, or `auto` for the first missing harmonic
    #[arg(long, default_value = "auto")]
    pub eta: String,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "dense")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KickbackArgs {
    #[arg(long)]
    pub group: String,
    /// Comma-separated irreducible labels making up the target space
    #[arg(long)]
    pub irreps: String,
    #[arg(long)]
    pub eta: String,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value = "trivial")]
    pub subgroup: String,
    #[arg(long, default_value = "auto")]
    pub eta: String,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value = "trivial")]
    pub subgroup: String,
    #[arg(long, default_value = "auto")]
    pub eta: String,
    #[arg(long, default_value_t = 1)]
    pub k_min: usize,
    #[arg(long)]
    pub k_max: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Dense-dimension guard, overridable through the environment.
pub fn guard_from_env() -> Result<usize, CliError> {
    match std::env::var(GUARD_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{GUARD_ENV}={v:?} is not a nonnegative integer"))),
        Err(_) => Ok(DEFAULT_GUARD),
    }
}

/// Parses arguments, runs the command, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(&cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
