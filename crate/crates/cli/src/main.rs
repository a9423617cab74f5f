//! Command-line front end: CSV in, CSV artifacts out.

mod commands;
mod csvio;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit codes: 0 ok, 2 input/validation problem, 3 parameter problem.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn parameter(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }

    pub fn from_lib(err: pcamix::Error) -> Self {
        use pcamix::Error::*;
        match err {
            KTooLarge { .. } | KTooSmall { .. } => CliError::parameter(err.to_string()),
            _ => CliError::input(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::input(err.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "pcamix",
    about = "Principal component analysis for mixed quantitative/qualitative data with varimax rotation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model and export scores, loadings and eigenvalues.
    Fit(FitArgs),
    /// Fit, rotate, and export both solutions plus the sweep trace.
    Rotate(RotateArgs),
    /// Time the SVD rotation path against the quantification baseline.
    Bench(BenchArgs),
    /// Write a simulated mixed dataset and its types sidecar.
    Simulate(SimulateArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    input: PathBuf,

    /// Types sidecar CSV with rows `column,kind`
    /// (kind: quantitative | qualitative).
    #[arg(long)]
    types: Option<PathBuf>,

    /// Columns to treat as qualitative, comma separated.
    #[arg(long, value_delimiter = ',')]
    qual: Vec<String>,

    /// Output directory for the artifact files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Number of retained dimensions.
    #[arg(long, default_value_t = 2)]
    k: usize,
}

#[derive(Args)]
struct RotateArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Number of retained (and rotated) dimensions.
    #[arg(long, default_value_t = 2)]
    k: usize,

    /// Convergence threshold on the rotation angles, radians.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,

    #[arg(long, default_value_t = 100)]
    max_sweeps: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Grid as n1,n2,../p1,p2,.. — e.g. 50,100,200/10,50.
    #[arg(long, default_value = "50,100,200/10,50")]
    grid: String,

    #[arg(long, default_value_t = 20)]
    reps: usize,

    #[arg(long, default_value_t = 42)]
    seed: u64,

    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Single cell n/p, e.g. 100/10.
    #[arg(long)]
    grid: String,

    #[arg(long, default_value_t = 42)]
    seed: u64,

    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fit(args) => commands::cmd_fit(&args.input, args.k),
        Command::Rotate(args) => {
            commands::cmd_rotate(&args.input, args.k, args.tol, args.max_sweeps)
        }
        Command::Bench(args) => commands::cmd_bench(&args.grid, args.reps, args.seed, &args.out),
        Command::Simulate(args) => commands::cmd_simulate(&args.grid, args.seed, &args.out),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
