//! Command-line front end.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::checkpoint::load_checkpoint;
use crate::config::{parse_config, ExperimentConfig};
use crate::error::HarnessError;
use crate::experiments::{resume_experiment, run_experiment, Outcome};

pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cnls", version, about = "Coupled NLS experiment runner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment and write its CSV, checkpoint and verdict.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Parse and validate a configuration without running it.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
    /// Continue from a checkpoint to the configured t_end.
    Resume {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn load_config(path: &Path) -> Result<ExperimentConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| format!("{}: invalid configuration\n{e}", path.display()))
}

fn report(outcome: &Outcome) -> i32 {
    let v = &outcome.verdict;
    println!("{} ({}): {:?}", v.id, v.kind, v.status);
    for note in &v.notes {
        println!("  note: {note}");
    }
    for a in &outcome.artifacts {
        println!("  wrote {}", a.display());
    }
    v.status.exit_code()
}

fn runtime_error(e: HarnessError) -> i32 {
    eprintln!("error: {e}");
    match e {
        HarnessError::Config(_) | HarnessError::Checkpoint { .. } => EXIT_USAGE,
        HarnessError::Core(cnls_core::Error::Shape(_) | cnls_core::Error::InvalidParams(_)) => EXIT_USAGE,
        _ => 1,
    }
}

/// Executes a parsed command and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    match cli.command {
        Command::Check { config } => match load_config(&config) {
            Ok(c) => {
                println!("{}: ok ({} experiment `{}`)", config.display(), c.kind, c.id);
                0
            }
            Err(e) => {
                eprintln!("{e}");
                EXIT_USAGE
            }
        },
        Command::Run { config, out } => {
            let c = match load_config(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return EXIT_USAGE;
                }
            };
            match run_experiment(&c, &out) {
                Ok(o) => report(&o),
                Err(e) => runtime_error(e),
            }
        }
        Command::Resume { checkpoint, config, out } => {
            let c = match load_config(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return EXIT_USAGE;
                }
            };
            let ckpt = match load_checkpoint(&checkpoint) {
                Ok(k) => k,
                Err(e) => return runtime_error(e),
            };
            match resume_experiment(&c, &ckpt, &out) {
                Ok(o) => report(&o),
                Err(e) => runtime_error(e),
            }
        }
    }
}

/// Parses `args` (including the program name) and executes; clap usage
/// errors map to exit code 2, help and version to 0.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            code
        }
    }
}
