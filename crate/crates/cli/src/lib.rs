//! `cootkit`: file-based runs of the co-optimal transport solvers.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod pgm;
pub mod report;
pub mod runner;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use error::{CliError, CliResult};

/// Parses `args` (program name first), runs the command, prints the JSON report
/// to stdout and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match commands::execute(cli.command) {
        Ok((report, allow_maxiter)) => {
            let json = serde_json::to_string_pretty(&report.to_json()).expect("json values serialize");
            // a closed pipe (`| head`) is not an error; the artifacts are already on disk
            let _ = writeln!(std::io::stdout().lock(), "{json}");
            if report.converged || allow_maxiter {
                0
            } else {
                let e = CliError::NotConverged;
                eprintln!("cootkit: {e}");
                e.exit_code()
            }
        }
        Err(e) => {
            eprintln!("cootkit: {e}");
            e.exit_code()
        }
    }
}
