//! Command-line driver for the `nehari-core` pipeline.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit status, so the binary and the end-to-end tests share one code path.

pub mod args;
mod commands;
pub mod plot;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use thiserror::Error;

pub use args::{Cli, Command, NList};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CERTIFICATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_PARTIAL: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

/// Worker count for the data-parallel pool.
pub const WORKERS_ENV: &str = "NEHARI_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("certification failed for n = {0:?}")]
    Certification(Vec<usize>),

    #[error(transparent)]
    Numeric(#[from] nehari_core::Error),

    /// A computed quantity violated a bound it must satisfy.
    #[error("check failed: {0}")]
    Check(String),

    #[error("{failed} of {total} sweep entries failed")]
    Partial { failed: usize, total: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Numeric(nehari_core::Error::Config(_)) => EXIT_USAGE,
            CliError::Certification(_) => EXIT_CERTIFICATION,
            CliError::Partial { .. } => EXIT_PARTIAL,
            CliError::Numeric(_) | CliError::Check(_) | CliError::Io(_) => EXIT_NUMERIC,
        }
    }
}

/// Runs the command line `args` (including the program name) and returns the
/// exit status. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    if let Err(e) = configure_workers() {
        let _ = writeln!(err, "{e}");
        return e.exit_code();
    }
    match commands::dispatch(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn configure_workers() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            nehari_core::par::configure_workers(n);
            Ok(())
        }
        _ => Err(CliError::Usage(format!(
            "{WORKERS_ENV} must be a positive integer, got `{raw}`"
        ))),
    }
}
