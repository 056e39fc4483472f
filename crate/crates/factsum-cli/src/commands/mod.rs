//! Subcommand implementations and shared per-run plumbing.

mod augment;
mod clean;
mod extract;
mod filter;
mod score;
mod stats;

use std::path::Path;

use crate::args::{Cli, Command};
use crate::errors::CliError;
use crate::io::ReadOutcome;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Score(args) => score::run(args),
        Command::Filter(args) => filter::run(args),
        Command::Augment(args) => augment::run(args),
        Command::Clean(args) => clean::run(args),
        Command::Stats(args) => stats::run(args),
        Command::Extract(args) => extract::run(args),
    }
}

/// Prints lenient-mode skip diagnostics and rejects an effectively empty
/// corpus (processing zero records would fabricate empty artifacts).
fn check_corpus(outcome: &ReadOutcome, input: &Path) -> Result<(), CliError> {
    for diagnostic in &outcome.skipped {
        eprintln!("warning: skipped {diagnostic}");
    }
    if outcome.records.is_empty() {
        return Err(CliError::Usage(format!(
            "input {} contains no records",
            input.display()
        )));
    }
    Ok(())
}

/// A record-level failure: reported and skipped by default, fatal under
/// `--strict`.
#[derive(Debug, Clone, serde::Serialize)]
struct RecordError {
    id: String,
    line_no: usize,
    error: String,
}

/// Applies strict/lenient semantics to record-level errors collected during
/// processing: strict aborts on the first, lenient prints warnings.
fn handle_record_errors(errors: &[RecordError], strict: bool) -> Result<(), CliError> {
    if let (true, Some(first)) = (strict, errors.first()) {
        return Err(CliError::Data(format!(
            "record {:?} (line {}): {}",
            first.id, first.line_no, first.error
        )));
    }
    for err in errors {
        eprintln!(
            "warning: record {:?} (line {}): {} — skipped",
            err.id, err.line_no, err.error
        );
    }
    Ok(())
}
