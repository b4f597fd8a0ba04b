//! `susy-feshbach`: potentials, phase scans, resonance search and oracle validation for
//! the two-channel Feshbach model.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use susy_feshbach::Error;

use crate::config::{Options, Settings};

#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: Options,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Potential matrix on [0, rmax] (columns r, V11, V12, V22)
    Potential,
    /// Eigenphases and mixing parameter over [emin, emax]
    Scan,
    /// Newton search for the resonance zero of det F from a k1 seed
    Resonance,
    /// Closed form against the radial integrator, plus consistency checks
    Validate,
    /// Jost matrix at one energy
    Jost,
}

/// Errors that end a run; `Config` covers every bad input or precondition.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Failed(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Failed(_) => 1,
        }
    }
}

pub fn core_failure(e: Error) -> Failure {
    match e {
        Error::InvalidArgument(_)
        | Error::Unsupported(_)
        | Error::InvalidWidth(_)
        | Error::ConstraintViolation(_)
        | Error::UnknownSource(_)
        | Error::DimensionMismatch { .. } => Failure::Config(e.to_string()),
        _ => Failure::Failed(e.to_string()),
    }
}

/// Text to emit and whether the run counts as a success.
pub struct Outcome {
    text: String,
    ok: bool,
}

impl Outcome {
    pub fn success(text: String) -> Self {
        Self { text, ok: true }
    }

    pub fn failure(text: String) -> Self {
        Self { text, ok: false }
    }
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let file = match &cli.options.config {
        Some(path) => Options::from_file(path)?,
        None => Options::default(),
    };
    let settings = Settings::resolve(cli.options.merged_over(file))?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = settings.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Failure::Config(format!("cannot start {} threads: {e}", settings.threads.unwrap_or(0))))?;

    let outcome = pool.install(|| match cli.command {
        Command::Potential => commands::potential(&settings),
        Command::Scan => commands::scan(&settings),
        Command::Resonance => commands::resonance(&settings),
        Command::Validate => commands::validate(&settings),
        Command::Jost => commands::jost(&settings),
    })?;

    match &settings.out {
        Some(path) => fs::write(path, &outcome.text)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?,
        None => io::stdout()
            .write_all(outcome.text.as_bytes())
            .map_err(|e| Failure::Failed(format!("cannot write to stdout: {e}")))?,
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) if outcome.ok => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(failure) => {
            let (Failure::Config(msg) | Failure::Failed(msg)) = &failure;
            eprintln!("error: {msg}");
            ExitCode::from(failure.exit_code())
        }
    }
}
