//! Command line frontend for the box-union measure library.
//!
//! Exit codes: 0 on success (including `--help`/`--version`), 1 on input
//! errors (unreadable or malformed files, invalid arguments, oracle limits,
//! rejected decompositions), 2 when an internal assertion fails.

mod commands;
mod router;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use commands::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match panic::catch_unwind(AssertUnwindSafe(|| commands::run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
        Err(_) => {
            // The panic hook has already printed the assertion message.
            eprintln!("error: internal assertion failed");
            ExitCode::from(2)
        }
    }
}
