//! `mnl`: mixed-norm Littlewood-Paley toolkit.
//!
//! Exit status: 0 when every verdict passes, 1 when any fails, 2 on a
//! configuration or I/O error.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Settings;

#[derive(Parser)]
#[command(name = "mnl", version, about = "Norms, decompositions and inequality checks for band-limited fields on the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the B or F quasi-norm of a field file
    Norm(Settings),
    /// Split a field file into Littlewood-Paley bands
    Decompose(Settings),
    /// Run inequality checks on seeded ensembles
    Verify(Settings),
    /// Fit the growth exponent of ||f||_r / ||f||_p over spectral radii
    Sweep(Settings),
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("MNL_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| format!("MNL_THREADS: `{raw}` is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| format!("MNL_THREADS: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let (settings, run): (Settings, fn(&Settings) -> _) = match cli.command {
        Command::Norm(s) => (s, commands::norm),
        Command::Decompose(s) => (s, commands::decompose),
        Command::Verify(s) => (s, commands::verify),
        Command::Sweep(s) => (s, commands::sweep),
    };
    let outcome = settings.resolve().and_then(|s| run(&s));
    match outcome {
        Ok(o) if o.passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprint!("error: {e}");
            ExitCode::from(2)
        }
    }
}
