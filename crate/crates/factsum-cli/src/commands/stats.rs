//! `factsum stats` — corpus distribution summaries.

use factsum::dataset::{corpus_stats, CorpusRecord, CorpusStats, DistSummary};
use factsum::entities::{ingest_annotations, EntityExtractor, EntityInventory};
use factsum::textproc::tokenize;

use crate::args::{ExtractorArg, ReportArg, StatsArgs};
use crate::commands::check_corpus;
use crate::context::Context;
use crate::errors::CliError;
use crate::io::{emit, emit_line, meta_line, read_corpus, ArtifactWriter};

pub fn run(args: StatsArgs) -> Result<(), CliError> {
    let ctx = Context::resolve(&args.common)?;
    let corpus = read_corpus(&args.common.input, ctx.strict)?;
    check_corpus(&corpus, &args.common.input)?;

    // In annotations mode a record without entities_target contributes an
    // empty inventory; that is a data gap worth a diagnostic (fatal under
    // --strict), not a reason to drop the record's length stats.
    if ctx.extractor_mode == ExtractorArg::Annotations {
        for loaded in &corpus.records {
            if loaded.record.entities_target.is_none() {
                let msg = format!(
                    "record {:?} (line {}): annotations extractor requires entities_target",
                    loaded.record.id, loaded.line_no
                );
                if ctx.strict {
                    return Err(CliError::Data(msg));
                }
                eprintln!("warning: {msg} — counted as zero entities");
            }
        }
    }

    let records: Vec<CorpusRecord> = corpus.records.iter().map(|l| l.record.clone()).collect();
    let target_entities = |record: &CorpusRecord| -> EntityInventory {
        match ctx.extractor_mode {
            ExtractorArg::Heuristic => ctx.heuristic.extract(&tokenize(&record.target)),
            ExtractorArg::Annotations => match &record.entities_target {
                Some(strings) => ingest_annotations(strings),
                None => EntityInventory::default(),
            },
        }
    };
    let stats =
        corpus_stats(&records, &target_entities).map_err(|e| CliError::Usage(e.to_string()))?;

    let artifact = serde_json::json!({
        "_meta": serde_json::from_str::<serde_json::Value>(
            &meta_line("stats", ctx.config_echo(&args.common))
        )
        .expect("meta is valid json")["_meta"],
        "stats": stats,
    });
    let artifact_text = serde_json::to_string_pretty(&artifact).expect("stats serialize");

    match args.report {
        ReportArg::Table => emit(&render_stats_table(&stats)),
        ReportArg::Json => emit_line(&artifact_text),
        ReportArg::Both => {
            emit(&render_stats_table(&stats));
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

fn render_stats_table(stats: &CorpusStats) -> String {
    let rows: [(&str, &DistSummary); 5] = [
        ("source_tokens", &stats.source_tokens),
        ("target_tokens", &stats.target_tokens),
        ("target_sentences", &stats.target_sentences),
        ("target_entities(U)", &stats.target_entities_unique),
        ("target_entities(NU)", &stats.target_entities_non_unique),
    ];
    let mut out = format!("records: {}\n", stats.records);
    out.push_str(&format!(
        "{:<20}  {:>10}  {:>10}  {:>8}  {:>8}\n",
        "distribution", "mean", "median", "min", "max"
    ));
    for (name, dist) in rows {
        out.push_str(&format!(
            "{:<20}  {:>10.2}  {:>10.1}  {:>8}  {:>8}\n",
            name, dist.mean, dist.median, dist.min, dist.max
        ));
    }
    out
}
