//! `symcloud` batch CLI: dataset preparation, normalization statistics,
//! symmetry analysis, half-shape reconstruction, and evaluation reports.
//!
//! Exit codes: 0 success, 1 partial per-shape failures, 2 invalid
//! invocation or input. Progress goes to stderr; machine-readable
//! results go to files and stdout.

mod commands;
mod svg;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "symcloud",
    version,
    about = "Point-cloud reflection-symmetry analysis and generative-model evaluation"
)]
struct Cli {
    /// Worker threads for shape-level parallelism (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mirror train-split shapes into half-objects and write a new dataset.
    Prep(commands::prep::PrepArgs),
    /// Derive normalization statistics (mu, sigma) and record them in a manifest.
    Stats(commands::stats::StatsArgs),
    /// Score reflection symmetry for every shape in a dataset.
    Symmetry(commands::symmetry::SymmetryArgs),
    /// Mirror half shapes into full shapes, denormalize, and downsample.
    Reconstruct(commands::reconstruct::ReconstructArgs),
    /// Compare a generated shape set against a reference set (1-NNA, FPD).
    Eval(commands::eval::EvalArgs),
    /// Check that every manifest entry parses to its declared point count.
    Verify(commands::verify::VerifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(workers) = cli.workers {
        if workers == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
        {
            eprintln!("error: failed to size the worker pool: {e}");
            return ExitCode::from(2);
        }
    }

    let outcome = match cli.command {
        Command::Prep(args) => commands::prep::run(args),
        Command::Stats(args) => commands::stats::run(args),
        Command::Symmetry(args) => commands::symmetry::run(args),
        Command::Reconstruct(args) => commands::reconstruct::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Verify(args) => commands::verify::run(args),
    };

    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
