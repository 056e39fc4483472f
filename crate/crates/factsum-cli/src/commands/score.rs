//! `factsum score` — entity metrics and ROUGE over a scored corpus.

use factsum::entities::EntityInventory;
use factsum::metrics::{aggregate, render_table, score_record, RecordScores, ScoreInputs};
use factsum::textproc::{tokenize, TokenizedText};

use crate::args::{ReportArg, ScoreArgs};
use crate::commands::{check_corpus, handle_record_errors, RecordError};
use crate::context::{tokenize_optional, Context};
use crate::errors::CliError;
use crate::io::{emit, emit_line, meta_line, read_corpus, ArtifactWriter, LoadedRecord};
use crate::runner::par_map_ordered;

pub fn run(args: ScoreArgs) -> Result<(), CliError> {
    let ctx = Context::resolve(&args.common)?;
    let corpus = read_corpus(&args.common.input, ctx.strict)?;
    check_corpus(&corpus, &args.common.input)?;

    let results = par_map_ordered(ctx.jobs, &corpus.records, |loaded| score_one(&ctx, loaded));
    let mut scores = Vec::new();
    let mut errors = Vec::new();
    for result in results {
        match result {
            Ok(s) => scores.push(s),
            Err(e) => errors.push(e),
        }
    }
    handle_record_errors(&errors, ctx.strict)?;
    if scores.is_empty() {
        return Err(CliError::Usage(
            "no scorable records in input (every record was skipped)".into(),
        ));
    }

    let report = aggregate(scores, ctx.policy).map_err(|e| CliError::Usage(e.to_string()))?;

    let mut config = ctx.config_echo(&args.common);
    config["mode"] = args.mode.echo().into();
    config["label"] = args.label.clone().into();
    let artifact = serde_json::json!({
        "_meta": serde_json::from_str::<serde_json::Value>(&meta_line("score", config))
            .expect("meta is valid json")["_meta"],
        "policy": report.policy,
        "aggregate": report.aggregate,
        "records": report.records,
        "errors": errors,
    });
    let artifact_text = serde_json::to_string_pretty(&artifact).expect("report serializes");

    match args.report {
        ReportArg::Table => emit(&render_table(&report, &args.label, args.mode.single())),
        ReportArg::Json => emit_line(&artifact_text),
        ReportArg::Both => {
            emit(&render_table(&report, &args.label, args.mode.single()));
            emit_line(&artifact_text);
        }
    }
    if let Some(path) = &args.common.output {
        let mut writer = ArtifactWriter::create(path)?;
        writer.write_line(&artifact_text)?;
        writer.finish()?;
    }
    Ok(())
}

fn score_one(ctx: &Context, loaded: &LoadedRecord) -> Result<RecordScores, RecordError> {
    let record = &loaded.record;
    let fail = |msg: String| RecordError {
        id: record.id.clone(),
        line_no: loaded.line_no,
        error: msg,
    };
    let hyp_raw = record
        .hypothesis
        .as_deref()
        .ok_or_else(|| fail("record lacks a hypothesis".into()))?;
    let source = tokenize_optional(&record.source)
        .ok_or_else(|| fail("record has an empty source".into()))?;
    // An empty hypothesis is scorable: its metrics come out undefined and
    // are tallied as such, which is the honest reading of "nothing written".
    let hypothesis = tokenize(hyp_raw);
    let hyp_entities = ctx
        .record_inventory(
            &hypothesis,
            record.entities_hypothesis.as_ref(),
            "hypothesis",
        )
        .map_err(fail)?;
    let target: Option<(TokenizedText, EntityInventory)> = match tokenize_optional(&record.target) {
        Some(text) => {
            let inventory = ctx
                .record_inventory(&text, record.entities_target.as_ref(), "target")
                .map_err(fail)?;
            Some((text, inventory))
        }
        None => None,
    };
    let inputs = ScoreInputs {
        id: &record.id,
        source: &source,
        hypothesis: &hypothesis,
        hyp_entities: &hyp_entities,
        target: target.as_ref().map(|(text, inv)| (text, inv)),
    };
    Ok(score_record(&inputs, &ctx.stopwords, ctx.policy))
}
