//! Command-line front end: argument parsing, dispatch and output.
//!
//! Exit codes are a stable contract: 0 on success, 1 for usage errors
//! (bad syntax, unsupported method or domain), 2 for numerical failures
//! and for comparisons that do not pass.

use std::ffi::OsString;
use std::fmt;
use std::fs::File;
use std::io::{self, Write};

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;

pub mod args;
mod commands;
pub mod compare;

pub use args::{Cli, Command};
pub use commands::{BcRow, EvolveRow};
use args::{Format, Output};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    /// A comparison ran to completion but did not pass.
    ComparisonFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numeric(_) | CliError::ComparisonFailed => EXIT_NUMERIC,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::ComparisonFailed => f.write_str("comparison failed"),
        }
    }
}

impl From<kreinpath::Error> for CliError {
    fn from(e: kreinpath::Error) -> Self {
        if e.is_numeric_failure() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

/// Parse `argv` (including the program name) without exiting the process.
pub fn parse_invocation<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(argv)
}

/// Run one invocation, writing data to `stdout` and diagnostics to `stderr`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match parse_invocation(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match commands::dispatch(&cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}

/// Write `rows` as CSV or `json` as JSON to `--out` or `stdout`.
pub(crate) fn emit<R: Serialize, J: Serialize>(
    output: &Output,
    rows: &[R],
    json: &J,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let mut file;
    let sink: &mut dyn Write = match &output.out {
        Some(path) => {
            file = File::create(path)
                .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
            &mut file
        }
        None => stdout,
    };
    let written = match output.format {
        Format::Csv => kreinpath::export::write_csv(rows, &mut *sink),
        Format::Json => kreinpath::export::write_json(json, &mut *sink),
    };
    written.map_err(|e| CliError::Usage(e.to_string()))?;
    sink.flush().map_err(|e: io::Error| CliError::Usage(e.to_string()))
}
