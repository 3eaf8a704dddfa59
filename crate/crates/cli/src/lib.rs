//! Command-line front end: data generation, denoising experiments, metrics and
//! small hand-written instances. The `icfp` binary is a thin wrapper around
//! [`run`].

mod args;
mod commands;
pub mod manifest;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;

use clap::Parser;

pub use args::{Cli, Command};
pub use commands::{write_trace_csv, TRACE_COLUMNS};
pub use manifest::{manifest_path, RunManifest};

pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FORMAT: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Thread-count override for the data-parallel loops (0 or unset: automatic).
pub const THREADS_ENV: &str = "ICFP_THREADS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<icfp::Error> for CliError {
    fn from(e: icfp::Error) -> Self {
        let code = match e {
            icfp::Error::ImageFormat { .. } | icfp::Error::Parse { .. } => EXIT_FORMAT,
            icfp::Error::StepSizeOutOfRange { .. } => EXIT_NUMERICAL,
            icfp::Error::DimensionMismatch { .. } | icfp::Error::InvalidArgument(_) => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Sizes the global thread pool from [`THREADS_ENV`]. Only affects speed.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("{THREADS_ENV} must be a non-negative integer, got '{raw}'")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot configure {n} threads: {e}")))?;
    }
    Ok(())
}

/// Parses `argv` (program name first) and runs the command, writing reports
/// to `out`.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            write!(out, "{e}").map_err(|e| CliError::usage(e.to_string()))?;
            return Ok(());
        }
        Err(e) => return Err(CliError::usage(e.render().to_string())),
    };
    commands::dispatch(cli.command, out)
}
