//! `factsum augment` — rewrite targets as entity chain + separator + summary.
//!
//! Each output record keeps its pre-augmentation target in
//! `original_target`. A separator that collides with any record's chain or
//! summary aborts the whole run (listing the offending ids) without writing
//! anything: a partially augmented corpus mixing two target formats is worse
//! than no corpus.

use factsum::dataset::jaens_augment;
use factsum::Error;

use crate::args::AugmentArgs;
use crate::commands::{check_corpus, handle_record_errors, RecordError};
use crate::context::Context;
use crate::errors::CliError;
use crate::io::{meta_line, read_corpus, ArtifactWriter, LoadedRecord};
use crate::runner::par_map_ordered;

enum AugmentResult {
    Line(String),
    Collision(String),
    Invalid(RecordError),
}

pub fn run(args: AugmentArgs) -> Result<(), CliError> {
    let ctx = Context::resolve(&args.common)?;
    if args.separator.is_empty() {
        return Err(CliError::Usage("--separator must be non-empty".into()));
    }
    let output =
        args.common.output.clone().ok_or_else(|| {
            CliError::Usage("augment writes a corpus; --output is required".into())
        })?;

    let corpus = read_corpus(&args.common.input, ctx.strict)?;
    check_corpus(&corpus, &args.common.input)?;

    let results = par_map_ordered(ctx.jobs, &corpus.records, |loaded| {
        augment_one(&ctx, &args, loaded)
    });

    let collisions: Vec<&String> = results
        .iter()
        .filter_map(|r| match r {
            AugmentResult::Collision(id) => Some(id),
            _ => None,
        })
        .collect();
    if !collisions.is_empty() {
        let ids = collisions
            .iter()
            .map(|s| s.as_str())
            .collect::<Vec<_>>()
            .join(", ");
        return Err(CliError::Other(anyhow::anyhow!(
            "separator {:?} occurs in {} record(s): {ids}; choose a separator absent from the data (no output written)",
            args.separator,
            collisions.len(),
        )));
    }
    let errors: Vec<RecordError> = results
        .iter()
        .filter_map(|r| match r {
            AugmentResult::Invalid(e) => Some(e.clone()),
            _ => None,
        })
        .collect();
    handle_record_errors(&errors, ctx.strict)?;

    let mut config = ctx.config_echo(&args.common);
    config["separator"] = args.separator.clone().into();
    let mut writer = ArtifactWriter::create(&output)?;
    writer.write_line(&meta_line("augment", config))?;
    let mut written = 0usize;
    for result in &results {
        if let AugmentResult::Line(line) = result {
            writer.write_line(line)?;
            written += 1;
        }
    }
    writer.finish()?;
    eprintln!(
        "augment: wrote {written} of {} records (skipped {})",
        results.len(),
        results.len() - written
    );
    Ok(())
}

fn augment_one(ctx: &Context, args: &AugmentArgs, loaded: &LoadedRecord) -> AugmentResult {
    let record = &loaded.record;
    let fail = |msg: String| {
        AugmentResult::Invalid(RecordError {
            id: record.id.clone(),
            line_no: loaded.line_no,
            error: msg,
        })
    };
    let extractor = match ctx.record_extractor(record.entities_target.as_ref(), "target") {
        Ok(e) => e,
        Err(msg) => return fail(msg),
    };
    match jaens_augment(record, &extractor, &args.separator) {
        Ok(augmented) => {
            let mut rewritten = record.clone();
            rewritten.original_target = Some(record.target.clone());
            rewritten.target = augmented.serialize();
            AugmentResult::Line(serde_json::to_string(&rewritten).expect("record serializes"))
        }
        Err(Error::SeparatorCollision { .. }) => AugmentResult::Collision(record.id.clone()),
        Err(e) => fail(e.to_string()),
    }
}
