//! `factsum filter` — sentence-level or record-level groundedness filtering.
//!
//! Writes two artifacts: the filtered corpus at `--output`, and an audit
//! sidecar (`*.audit.jsonl`) with one outcome entry per input record, so
//! every drop is accounted for. Records the filter leaves untouched are
//! passed through byte-identically from the input.

use factsum::dataset::{filter_pairs, filter_sentences, FilterOutcome};
use factsum::entities::CountMode;

use crate::args::{FilterArgs, StrategyArg};
use crate::commands::check_corpus;
use crate::context::Context;
use crate::errors::CliError;
use crate::io::{audit_path, meta_line, read_corpus, ArtifactWriter, LoadedRecord};
use crate::runner::par_map_ordered;

struct RecordResult {
    /// Output line for a kept record (raw input line when unchanged).
    kept_line: Option<String>,
    audit: FilterOutcome,
    /// Why the record could not be processed at all, if so.
    invalid: Option<String>,
    line_no: usize,
}

pub fn run(args: FilterArgs) -> Result<(), CliError> {
    let ctx = Context::resolve(&args.common)?;
    if !(0.0..=1.0).contains(&args.threshold) {
        return Err(CliError::Usage(format!(
            "--threshold must be in [0, 1], got {}",
            args.threshold
        )));
    }
    let mode = match args.strategy {
        StrategyArg::Pair => args.mode.single().ok_or_else(|| {
            CliError::Usage("--mode both is not a pair-filter decision; choose u or nu".into())
        })?,
        // The sentence strategy is all-or-nothing per sentence; no counting
        // variant is involved.
        StrategyArg::Sentence => CountMode::NonUnique,
    };
    let output =
        args.common.output.clone().ok_or_else(|| {
            CliError::Usage("filter writes a corpus; --output is required".into())
        })?;
    let audit = audit_path(&output);

    let corpus = read_corpus(&args.common.input, ctx.strict)?;
    check_corpus(&corpus, &args.common.input)?;

    let results = par_map_ordered(ctx.jobs, &corpus.records, |loaded| {
        filter_one(&ctx, &args, mode, loaded)
    });
    if ctx.strict {
        if let Some(bad) = results.iter().find(|r| r.invalid.is_some()) {
            return Err(CliError::Data(format!(
                "record {:?} (line {}): {}",
                bad.audit.record_id,
                bad.line_no,
                bad.invalid.as_deref().unwrap_or_default()
            )));
        }
    }

    let mut config = ctx.config_echo(&args.common);
    config["strategy"] = args.strategy.echo().into();
    if args.strategy == StrategyArg::Pair {
        config["threshold"] = args.threshold.into();
        config["mode"] = args.mode.echo().into();
    }

    let mut corpus_writer = ArtifactWriter::create(&output)?;
    let mut audit_writer = ArtifactWriter::create(&audit)?;
    corpus_writer.write_line(&meta_line("filter", config.clone()))?;
    audit_writer.write_line(&meta_line("filter", config))?;

    let (mut kept, mut dropped, mut invalid) = (0usize, 0usize, 0usize);
    for result in &results {
        if let Some(msg) = &result.invalid {
            invalid += 1;
            eprintln!(
                "warning: record {:?} (line {}): {msg} — skipped",
                result.audit.record_id, result.line_no
            );
        } else if result.kept_line.is_some() {
            kept += 1;
        } else {
            dropped += 1;
        }
        if let Some(line) = &result.kept_line {
            corpus_writer.write_line(line)?;
        }
        audit_writer
            .write_line(&serde_json::to_string(&result.audit).expect("outcome serializes"))?;
    }
    corpus_writer.finish()?;
    audit_writer.finish()?;

    let sentences_dropped: usize = results
        .iter()
        .map(|r| r.audit.dropped_sentences.len())
        .sum();
    eprintln!(
        "filter: kept {kept} of {} records (dropped {dropped}, invalid {invalid}, sentences removed {sentences_dropped}); audit at {}",
        results.len(),
        audit.display()
    );
    Ok(())
}

fn invalid_outcome(record_id: &str, msg: &str) -> FilterOutcome {
    FilterOutcome {
        record_id: record_id.to_string(),
        kept_sentence_indices: Vec::new(),
        dropped_sentences: Vec::new(),
        record_kept: false,
        reason: None,
        prec_source: None,
        flags: vec![format!("invalid-record: {msg}")],
    }
}

fn filter_one(
    ctx: &Context,
    args: &FilterArgs,
    mode: CountMode,
    loaded: &LoadedRecord,
) -> RecordResult {
    let record = &loaded.record;
    let fail = |msg: String| RecordResult {
        kept_line: None,
        audit: invalid_outcome(&record.id, &msg),
        invalid: Some(msg),
        line_no: loaded.line_no,
    };
    match args.strategy {
        StrategyArg::Sentence => {
            let extractor = match ctx.sentence_extractor(record.entities_target.as_ref(), "target")
            {
                Ok(e) => e,
                Err(msg) => return fail(msg),
            };
            match filter_sentences(record, &extractor, &ctx.stopwords, ctx.policy) {
                Ok((Some(filtered), audit)) => {
                    let kept_line = if filtered.target == record.target {
                        loaded.raw.clone()
                    } else {
                        serde_json::to_string(&filtered).expect("record serializes")
                    };
                    RecordResult {
                        kept_line: Some(kept_line),
                        audit,
                        invalid: None,
                        line_no: loaded.line_no,
                    }
                }
                Ok((None, audit)) => RecordResult {
                    kept_line: None,
                    audit,
                    invalid: None,
                    line_no: loaded.line_no,
                },
                Err(e) => fail(e.to_string()),
            }
        }
        StrategyArg::Pair => {
            let extractor = match ctx.record_extractor(record.entities_target.as_ref(), "target") {
                Ok(e) => e,
                Err(msg) => return fail(msg),
            };
            match filter_pairs(
                record,
                args.threshold,
                mode,
                &extractor,
                &ctx.stopwords,
                ctx.policy,
            ) {
                Ok(audit) => RecordResult {
                    kept_line: audit.record_kept.then(|| loaded.raw.clone()),
                    audit,
                    invalid: None,
                    line_no: loaded.line_no,
                },
                Err(e) => fail(e.to_string()),
            }
        }
    }
}
