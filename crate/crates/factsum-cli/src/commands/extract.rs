//! `factsum extract` — per-record entity inventories as JSONL.

use factsum::entities::CountMode;
use factsum::textproc::tokenize;

use crate::args::{ExtractArgs, FieldArg};
use crate::commands::{check_corpus, handle_record_errors, RecordError};
use crate::context::Context;
use crate::errors::CliError;
use crate::io::{emit_line, meta_line, read_corpus, ArtifactWriter, LoadedRecord};
use crate::runner::par_map_ordered;

pub fn run(args: ExtractArgs) -> Result<(), CliError> {
    let ctx = Context::resolve(&args.common)?;
    let corpus = read_corpus(&args.common.input, ctx.strict)?;
    check_corpus(&corpus, &args.common.input)?;

    let results = par_map_ordered(ctx.jobs, &corpus.records, |loaded| {
        extract_one(&ctx, args.field, loaded)
    });
    let errors: Vec<RecordError> = results
        .iter()
        .filter_map(|r| r.as_ref().err().cloned())
        .collect();
    handle_record_errors(&errors, ctx.strict)?;

    let lines: Vec<&String> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    if lines.is_empty() {
        return Err(CliError::Usage(
            "no extractable records in input (every record was skipped)".into(),
        ));
    }
    match &args.common.output {
        Some(path) => {
            let mut config = ctx.config_echo(&args.common);
            config["field"] = args.field.echo().into();
            let mut writer = ArtifactWriter::create(path)?;
            writer.write_line(&meta_line("extract", config))?;
            for line in lines {
                writer.write_line(line)?;
            }
            writer.finish()?;
        }
        None => {
            for line in lines {
                emit_line(line);
            }
        }
    }
    Ok(())
}

fn extract_one(
    ctx: &Context,
    field: FieldArg,
    loaded: &LoadedRecord,
) -> Result<String, RecordError> {
    let record = &loaded.record;
    let fail = |msg: String| RecordError {
        id: record.id.clone(),
        line_no: loaded.line_no,
        error: msg,
    };
    let (text, annotations) = match field {
        FieldArg::Source => (record.source.as_str(), record.entities_source.as_ref()),
        FieldArg::Target => (record.target.as_str(), record.entities_target.as_ref()),
        FieldArg::Hypothesis => (
            record
                .hypothesis
                .as_deref()
                .ok_or_else(|| fail("record lacks a hypothesis".into()))?,
            record.entities_hypothesis.as_ref(),
        ),
    };
    let inventory = ctx
        .record_inventory(&tokenize(text), annotations, field.echo())
        .map_err(fail)?;
    let entities: Vec<&str> = inventory
        .mentions()
        .iter()
        .map(|m| m.key.as_str())
        .collect();
    let line = serde_json::json!({
        "id": record.id,
        "field": field.echo(),
        "count_u": inventory.count(CountMode::Unique),
        "count_nu": inventory.count(CountMode::NonUnique),
        "entities": entities,
    });
    Ok(serde_json::to_string(&line).expect("line serializes"))
}
