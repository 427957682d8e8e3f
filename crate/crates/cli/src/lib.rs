//! Batch runner behind the `assocq` binary.
//!
//! Each subcommand reads a [`config::RunConfig`], runs inside a rayon pool of
//! the requested size and writes its payload files plus `manifest.json` to
//! the output directory. Payloads never contain timestamps, so two runs with
//! the same configuration produce identical files.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{CheckEntry, ChecksDocument, RatePoint};
pub use config::RunConfig;

/// Invalid input: bad config file, flag or model parameter. Exits with 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const EXIT_CHECK_FAILURE: u8 = 1;
pub const EXIT_CONFIG_ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "assocq", version, about = "Berry-Esseen experiments for sample quantiles of associated sequences")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// TOML configuration file; omitted keys take their defaults
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub replications: Option<usize>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value = "results")]
    pub out_dir: PathBuf,
    /// Spacing of the t-grid on which the distance is evaluated
    #[arg(long, global = true)]
    pub grid_step: Option<f64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Distance table over (case, p, n)
    Table1,
    /// Distance over a longer n grid and log-log slope per (case, p)
    Rates,
    /// Inequality checks: all, deterministic, exact, montecarlo or a check name
    Checks {
        #[arg(default_value = "all")]
        selector: String,
    },
    /// Simulate one path and print summary statistics
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Named case from the configuration
    #[arg(long, conflicts_with_all = ["kind", "param", "m"])]
    pub case: Option<String>,
    /// Coefficient scheme: exponential (a_j = rho^j) or polynomial (a_j = j^-s)
    #[arg(long, requires_all = ["param", "m"])]
    pub kind: Option<String>,
    /// rho for the exponential scheme, s for the polynomial one
    #[arg(long, allow_hyphen_values = true)]
    pub param: Option<f64>,
    /// Moving-average order
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
}

/// Parses arguments, runs the command and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG_ERROR } else { 0 });
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILURE),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG_ERROR)
        }
    }
}

/// Runs a parsed command; `Ok(false)` means the run finished but something
/// did not pass.
pub fn run(cli: &Cli) -> Result<bool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(threads) = cli.global.threads {
        if threads == 0 {
            return Err(UsageError("--threads must be positive".into()).into());
        }
        builder = builder.num_threads(threads);
    }
    let pool = builder.build()?;
    pool.install(|| commands::dispatch(cli))
}
