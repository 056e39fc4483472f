//! `factsum clean` — text cleanup plus token-length budget enforcement.
//!
//! Cleaning touches `source` and `target` (the training pair); hypotheses
//! and annotation fields pass through untouched — rewriting a model's output
//! before scoring it would falsify the measurement.

use factsum::dataset::{clean_text, enforce_length, CleaningPolicy, LengthPolicy, LengthViolation};

use crate::args::CleanArgs;
use crate::commands::check_corpus;
use crate::context::Context;
use crate::errors::CliError;
use crate::io::{meta_line, read_corpus, ArtifactWriter, LoadedRecord};
use crate::runner::par_map_ordered;

struct CleanResult {
    /// Serialized output record; `None` when the length action dropped it.
    line: Option<String>,
    violations: Vec<LengthViolation>,
    truncated: bool,
}

pub fn run(args: CleanArgs) -> Result<(), CliError> {
    let ctx = Context::resolve(&args.common)?;
    let output = args
        .common
        .output
        .clone()
        .ok_or_else(|| CliError::Usage("clean writes a corpus; --output is required".into()))?;
    let length_policy = match args.length_action.to_action() {
        Some(action) => {
            if args.max_source_tokens == 0 || args.max_target_tokens == 0 {
                return Err(CliError::Usage("length budgets must be positive".into()));
            }
            if args.min_target_tokens > args.max_target_tokens {
                return Err(CliError::Usage(format!(
                    "--min-target-tokens {} exceeds --max-target-tokens {}",
                    args.min_target_tokens, args.max_target_tokens
                )));
            }
            Some(LengthPolicy {
                max_source_tokens: args.max_source_tokens,
                max_target_tokens: args.max_target_tokens,
                min_target_tokens: args.min_target_tokens,
                action,
            })
        }
        None => None,
    };
    let cleaning = CleaningPolicy {
        lowercase: !args.keep_case,
        strip_citation_markers: !args.keep_citations,
        strip_punctuation: !args.keep_punctuation,
        strip_symbols: !args.keep_symbols,
        drop_numeral_tokens: !args.keep_numerals,
    };

    let corpus = read_corpus(&args.common.input, ctx.strict)?;
    check_corpus(&corpus, &args.common.input)?;

    let results = par_map_ordered(ctx.jobs, &corpus.records, |loaded| {
        clean_one(&cleaning, length_policy.as_ref(), loaded)
    });

    let mut config = ctx.config_echo(&args.common);
    config["cleaning"] = serde_json::to_value(cleaning).expect("policy serializes");
    config["length"] = match &length_policy {
        Some(policy) => serde_json::to_value(policy).expect("policy serializes"),
        None => serde_json::Value::Null,
    };
    let mut writer = ArtifactWriter::create(&output)?;
    writer.write_line(&meta_line("clean", config))?;
    let (mut written, mut dropped, mut truncated, mut flagged) = (0usize, 0usize, 0usize, 0usize);
    for result in &results {
        match &result.line {
            Some(line) => {
                writer.write_line(line)?;
                written += 1;
                truncated += usize::from(result.truncated);
                flagged += usize::from(!result.truncated && !result.violations.is_empty());
            }
            None => dropped += 1,
        }
    }
    writer.finish()?;
    eprintln!(
        "clean: wrote {written} of {} records (dropped {dropped}, truncated {truncated}, flagged {flagged})",
        results.len()
    );
    Ok(())
}

fn clean_one(
    cleaning: &CleaningPolicy,
    length_policy: Option<&LengthPolicy>,
    loaded: &LoadedRecord,
) -> CleanResult {
    let mut record = loaded.record.clone();
    record.source = clean_text(&record.source, cleaning);
    record.target = clean_text(&record.target, cleaning);
    let (kept, violations, truncated) = match length_policy {
        Some(policy) => {
            // Budgets were validated with the configuration; per-record
            // enforcement cannot fail after that.
            let outcome = enforce_length(&record, policy).expect("budgets pre-validated");
            (outcome.record, outcome.violations, outcome.modified)
        }
        None => (Some(record), Vec::new(), false),
    };
    CleanResult {
        line: kept.map(|r| serde_json::to_string(&r).expect("record serializes")),
        violations,
        truncated,
    }
}
