//! `freebound`: run the verification battery on exact surfaces, minimize
//! meshes with free boundary on the sphere, and summarize reports.
//!
//! Exit codes: 0 when everything passed, 1 when a check failed or the
//! solver did not converge, 2 for usage, input or schema errors.

mod export;
mod expr;
mod output;
mod solve;
mod spec;
mod summary;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "freebound",
    version,
    about = "Free-boundary minimal surface verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run residual checks on an exact surface.
    Verify(verify::VerifyArgs),
    /// Minimize area of a mesh whose boundary stays on the unit sphere.
    Solve(solve::SolveArgs),
    /// Merge report JSON files into CSV and markdown summaries.
    Report(summary::ReportArgs),
    /// Write a sampled point grid and a triangulation of an exact surface.
    Export(export::ExportArgs),
}

/// Options shared by every subcommand that writes files.
#[derive(Args, Clone, Debug)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, env = "FREEBOUND_OUT_DIR", default_value = "freebound-out")]
    pub out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl OutArgs {
    /// Runs `f` on a thread pool of the requested size.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.jobs {
            None => Ok(f()),
            Some(0) => bail!("--jobs must be at least 1"),
            Some(j) => Ok(rayon::ThreadPoolBuilder::new().num_threads(j).build()?.install(f)),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => verify::run(a),
        Command::Solve(a) => solve::run(a),
        Command::Report(a) => summary::run(a),
        Command::Export(a) => export::run(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
