//! `factsum` — entity-level factual consistency measurement and
//! hallucination-mitigation corpus transforms, as a batch CLI.
//!
//! Subcommands: `score`, `filter`, `augment`, `clean`, `stats`, `extract`.
//! Corpora are JSON Lines (one record object per line, optional `{"_meta":…}`
//! header). Exit codes: 0 success, 1 usage/configuration error, 2 data error
//! under `--strict`.

mod args;
mod commands;
mod context;
mod errors;
mod io;
mod runner;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help/--version are successful exits; everything else a clap
            // rejects is a usage error.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
