//! Batch front end for `adelic-qc`.
//!
//! Structured results go to stdout (or `--out`) as JSON, per-point data to CSV.
//! Failures print a JSON body on stderr and exit with 2 (input), 3 (admission
//! rejected), 4 (solver failure) or 5 (verification failure).

mod commands;
mod formats;

use std::path::PathBuf;
use std::process::ExitCode;

use adelic_qc::plane::SolverConfig;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "adelic-qc", version, about = "Renormalized Beltrami solvers on solenoids")]
struct RunConfig {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Keep the modes of a series with frequency in (1/n)Z.
    Filter {
        /// Series JSON (inline or path) or a fixture such as `constant:3`.
        #[arg(long)]
        mu: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Renormalized norm report of a series or fixture.
    Norm {
        #[arg(long)]
        mu: String,
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve and normalize the planar Beltrami equation at one level.
    SolveLevel {
        /// Series (with `--profile`) or `disk:K` for K times the unit disk.
        #[arg(long)]
        mu: String,
        #[arg(long, default_value = "bump:-0.6,0.6")]
        profile: String,
        #[command(flatten)]
        chain: ChainArgs,
        /// Index of the level in the chain.
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[command(flatten)]
        grid: GridArgs,
        /// Binary dump of the map values.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Binary dump of the level coefficient.
        #[arg(long)]
        coefficient_out: Option<PathBuf>,
    },
    /// Solve every level and report convergence diagnostics.
    Tower {
        #[arg(long)]
        mu: String,
        #[arg(long, default_value = "bump:-0.6,0.6")]
        profile: String,
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        reference_level: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-level differences and bound terms; defaults to `--out` with a `.csv` extension.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sample the quasiconformal extension of a circle-solenoid diffeomorphism.
    Extend {
        /// Diffeomorphism JSON: a real series `h` with `h(0) = 0`, optionally with `"chain"`.
        #[arg(long)]
        f: String,
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, value_enum, default_value_t = ExtendMethod::Series)]
        method: ExtendMethod,
        /// CSV output; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Beltrami coefficient of the extension, with its certificate and bound.
    Nvmu {
        #[arg(long)]
        f: String,
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        window: WindowArgs,
        /// Report the linearization at the identity instead.
        #[arg(long)]
        linear: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a self-check suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Truncation of the counterexample fixture.
        #[arg(long = "N", default_value_t = 6)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ChainArgs {
    /// `p=P`, `factorial` or `custom:n1,n2,...`.
    #[arg(long)]
    chain: Option<String>,
    #[arg(long, visible_alias = "levels", default_value_t = 6)]
    depth: usize,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Grid size N (a power of two).
    #[arg(long, env = "ADELIC_QC_GRID", default_value_t = 512)]
    grid: usize,
    /// Half width R of the plane window.
    #[arg(long, default_value_t = 4.0)]
    half_width: f64,
    #[arg(long, default_value_t = SolverConfig::default().tol)]
    tol: f64,
    #[arg(long, default_value_t = SolverConfig::default().max_iter)]
    max_iter: usize,
}

#[derive(Debug, Args)]
struct WindowArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x0: f64,
    #[arg(long, default_value_t = std::f64::consts::TAU, allow_hyphen_values = true)]
    x1: f64,
    #[arg(long, default_value_t = 64)]
    nx: usize,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    y0: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    y1: f64,
    #[arg(long, default_value_t = 33)]
    ny: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExtendMethod {
    /// Closed-form mode sum.
    Series,
    /// Adaptive quadrature of the averaging integral.
    Integral,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Counterexample,
    Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Input,
    Admission,
    NonConvergence,
    Verification,
}

impl ErrorKind {
    fn code(self) -> u8 {
        match self {
            ErrorKind::Input => 2,
            ErrorKind::Admission => 3,
            ErrorKind::NonConvergence => 4,
            ErrorKind::Verification => 5,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub error: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { error: ErrorKind::Input, message: message.into() }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        CliError { error: ErrorKind::Verification, message: message.into() }
    }
}

impl From<adelic_qc::Error> for CliError {
    fn from(e: adelic_qc::Error) -> Self {
        use adelic_qc::Error as E;
        let error = match e {
            E::NotAdmissible(_) => ErrorKind::Admission,
            E::NonConvergence { .. } | E::Degenerate(_) | E::BranchAmbiguity(_) => ErrorKind::NonConvergence,
            _ => ErrorKind::Input,
        };
        CliError { error, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    match commands::run(cfg.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e).expect("error body serializes"));
            ExitCode::from(e.error.code())
        }
    }
}
