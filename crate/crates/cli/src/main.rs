//! `bura`: compute, decompose and apply best uniform rational approximations
//! of `t^a / (1 + q t^a)` from the command line.
//!
//! Exit status is 0 on success, 2 when a computation does not converge or a
//! verification check fails, and 1 for usage and I/O errors.

mod commands;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use bura::remez::RemezConfig;
use bura::xnum::{Precision, DEFAULT_DIGITS};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Lowest precision accepted for a Remez run.
const MIN_CLI_DIGITS: u32 = 64;

#[derive(Parser, Debug)]
#[command(name = "bura", version, about = "Best uniform rational approximation of t^a/(1+q t^a) on [delta, 1]")]
struct Cli {
    #[command(flatten)]
    config: CliConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CliConfig {
    /// Working precision in decimal digits (at least 64).
    #[arg(long, global = true, env = "BURA_PRECISION", default_value_t = DEFAULT_DIGITS)]
    precision: u32,
    /// Relative spread of the error level at which the exchange stops.
    #[arg(long, global = true, default_value_t = 1e-10)]
    level_tol: f64,
    /// Directory for written files.
    #[arg(long, short = 'o', global = true, default_value = ".")]
    output_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Tab)]
    format: Format,
    /// Seed for randomized right-hand sides.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    /// Human-readable summary; coefficient files in `.tab` form.
    Tab,
    /// One JSON object per line on stdout.
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the BURA for (q, delta, alpha, k) and write its `.tab` file.
    Compute {
        #[command(flatten)]
        params: ParamArgs,
        /// Print only; do not write the coefficient file.
        #[arg(long)]
        no_write: bool,
    },
    /// Partial fractions, reciprocal form and interlacing of a BURA, read
    /// from a `.tab` file or computed from `q delta alpha k`.
    Decompose {
        /// A `.tab`/`.txt` file, or the four parameters.
        #[arg(num_args = 1..=4, required = true)]
        input: Vec<String>,
    },
    /// Build a 0-URA (`ura 0 q delta alpha k`) or a 1-URA
    /// (`ura 1 q0 q1 delta alpha k`).
    Ura {
        #[arg(value_parser = ["0", "1"])]
        order: String,
        #[arg(num_args = 4..=5, required = true, allow_hyphen_values = true)]
        values: Vec<String>,
        #[arg(long)]
        no_write: bool,
    },
    /// Solve a model problem on (0, 1) with a ≡ 1 and f ≡ 1.
    Solve(commands::SolveArgs),
    /// Compute a grid of BURAs in parallel and write their files.
    EmitTables(commands::GridArgs),
    /// Compare computed results with the bundled reference tables.
    Verify {
        /// File-name stems to check, e.g. `q000d0a25k7` or `qq22d0a50k3`.
        #[arg(long = "case")]
        cases: Vec<String>,
        /// Named subset of the manifest instead of explicit cases.
        #[arg(long, value_enum)]
        manifest: Option<verify::Subset>,
    },
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    q: f64,
    /// `0`, a decimal such as `1e-8`, or a code `d0`, `d6` .. `d9`.
    #[arg(value_parser = commands::parse_delta)]
    delta: f64,
    alpha: f64,
    k: usize,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(std::io::Error),
    /// Non-convergence or a failed check.
    Numeric(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliConfig {
    fn remez(&self) -> Result<RemezConfig, CliError> {
        if self.precision < MIN_CLI_DIGITS {
            return Err(CliError::Usage(format!(
                "precision {} is below the minimum of {MIN_CLI_DIGITS} digits",
                self.precision
            )));
        }
        if !(self.level_tol > 0.0 && self.level_tol < 1.0) {
            return Err(CliError::Usage(format!("level tolerance {} must lie in (0, 1)", self.level_tol)));
        }
        let precision = Precision::digits(self.precision).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(RemezConfig { precision, level_tol: self.level_tol, ..RemezConfig::default() })
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = &cli.config;
    match cli.command {
        Command::Compute { params, no_write } => commands::compute(cfg, &params, !no_write),
        Command::Decompose { input } => commands::decompose(cfg, &input),
        Command::Ura { order, values, no_write } => commands::ura(cfg, &order, &values, !no_write),
        Command::Solve(args) => commands::solve(cfg, &args),
        Command::EmitTables(grid) => commands::emit_tables(cfg, &grid),
        Command::Verify { cases, manifest } => verify::run(cfg, &cases, manifest),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
