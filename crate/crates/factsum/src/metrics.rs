//! Entity-level consistency metrics, ROUGE, per-record scoring, and macro
//! aggregation.
//!
//! Directionality is fixed and explicit:
//!
//! * `precision_source`  — hypothesis entities found in the **source**,
//!   over hypothesis entities. Measures how much of the summary is grounded
//!   in the input document.
//! * `precision_target`  — hypothesis entities found in the **reference**,
//!   over hypothesis entities.
//! * `recall_target`     — reference entities found in the **hypothesis**,
//!   over reference entities.
//! * `f1_target`         — harmonic mean of the two target-side scores.
//!
//! Each exists in a Unique (distinct surface forms) and Non-Unique
//! (per-mention) variant. A ratio whose denominator is an empty inventory is
//! *undefined* (`None`), never zero: "no entities to check" is different
//! from "all entities hallucinated". Macro aggregation averages defined
//! values only and reports how many records were undefined per metric.
//!
//! ROUGE-1/2/L/LSum are included so corpus transforms can be sanity-checked
//! against surface overlap as well. METEOR and BERTScore are out of scope
//! (they need external resources); report tables keep their columns with an
//! explicit "n/a" so layouts stay comparable.

use std::collections::HashMap;

use serde::Serialize;

use crate::entities::{CountMode, EntityInventory};
use crate::matching::{count_matched_in_target, count_matched_in_text, MatchPolicy, TextMatcher};
use crate::textproc::{ngrams, StopwordSet, TokenizedText};
use crate::{Error, Result};

fn ratio(matched: usize, total: usize) -> Option<f64> {
    (total > 0).then(|| matched as f64 / total as f64)
}

/// Fraction of hypothesis entities that partially match the source document.
/// `None` when the hypothesis has no entities under `mode`.
pub fn precision_source(
    hypothesis: &EntityInventory,
    source: &TokenizedText,
    mode: CountMode,
    stopwords: &StopwordSet,
    policy: MatchPolicy,
) -> Option<f64> {
    let matcher = TextMatcher::new(source, stopwords, policy);
    ratio(
        count_matched_in_text(hypothesis, &matcher, mode),
        hypothesis.count(mode),
    )
}

/// Fraction of hypothesis entities found on the reference side (per
/// `policy.target_match_mode`). `None` when the hypothesis has no entities.
pub fn precision_target(
    hypothesis: &EntityInventory,
    target: &EntityInventory,
    target_text: &TokenizedText,
    mode: CountMode,
    stopwords: &StopwordSet,
    policy: MatchPolicy,
) -> Option<f64> {
    ratio(
        count_matched_in_target(hypothesis, target, target_text, mode, stopwords, policy),
        hypothesis.count(mode),
    )
}

/// Fraction of reference entities found on the hypothesis side (per
/// `policy.target_match_mode`). `None` when the reference has no entities.
pub fn recall_target(
    hypothesis: &EntityInventory,
    hypothesis_text: &TokenizedText,
    target: &EntityInventory,
    mode: CountMode,
    stopwords: &StopwordSet,
    policy: MatchPolicy,
) -> Option<f64> {
    ratio(
        count_matched_in_target(target, hypothesis, hypothesis_text, mode, stopwords, policy),
        target.count(mode),
    )
}

/// Harmonic mean of precision and recall; 0 when both are 0.
/// Inputs must already be defined values in `[0, 1]`.
pub fn f1_target(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Precision/recall/F1 triple for one ROUGE variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    const ZERO: Self = Self {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };

    fn from_overlap(matched: f64, hyp_total: f64, ref_total: f64) -> Self {
        let precision = if hyp_total > 0.0 {
            matched / hyp_total
        } else {
            0.0
        };
        let recall = if ref_total > 0.0 {
            matched / ref_total
        } else {
            0.0
        };
        Self {
            precision,
            recall,
            f1: f1_target(precision, recall),
        }
    }
}

/// ROUGE-N: clipped n-gram overlap. Each reference n-gram can be consumed at
/// most as many times as it occurs. Zero (not undefined) when either side
/// has no n-grams — an empty candidate genuinely overlaps nothing.
///
/// # Errors
/// `n == 0` is an invalid argument.
pub fn rouge_n(hyp_tokens: &[String], ref_tokens: &[String], n: usize) -> Result<RougeScore> {
    let hyp_grams = ngrams(hyp_tokens, n)?;
    let ref_grams = ngrams(ref_tokens, n)?;
    if hyp_grams.is_empty() || ref_grams.is_empty() {
        return Ok(RougeScore::ZERO);
    }
    let mut budget: HashMap<&[String], usize> = HashMap::new();
    for gram in &ref_grams {
        *budget.entry(gram).or_default() += 1;
    }
    let mut matched = 0usize;
    for gram in &hyp_grams {
        if let Some(remaining) = budget.get_mut(gram) {
            if *remaining > 0 {
                *remaining -= 1;
                matched += 1;
            }
        }
    }
    Ok(RougeScore::from_overlap(
        matched as f64,
        hyp_grams.len() as f64,
        ref_grams.len() as f64,
    ))
}

fn lcs_table(a: &[String], b: &[String]) -> Vec<Vec<usize>> {
    let mut dp = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            dp[i][j] = if a[i - 1] == b[j - 1] {
                dp[i - 1][j - 1] + 1
            } else {
                dp[i - 1][j].max(dp[i][j - 1])
            };
        }
    }
    dp
}

/// Indices into `a` on the canonical longest-common-subsequence path with
/// `b` (ties broken toward earlier `a` positions, matching the usual
/// backtrack).
fn lcs_indices(a: &[String], b: &[String]) -> Vec<usize> {
    let dp = lcs_table(a, b);
    let mut indices = Vec::with_capacity(dp[a.len()][b.len()]);
    let (mut i, mut j) = (a.len(), b.len());
    while i > 0 && j > 0 {
        if a[i - 1] == b[j - 1] && dp[i][j] == dp[i - 1][j - 1] + 1 {
            indices.push(i - 1);
            i -= 1;
            j -= 1;
        } else if dp[i - 1][j] >= dp[i][j - 1] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    indices.reverse();
    indices
}

/// ROUGE-L: longest common subsequence over whole token streams.
pub fn rouge_l(hyp_tokens: &[String], ref_tokens: &[String]) -> RougeScore {
    if hyp_tokens.is_empty() || ref_tokens.is_empty() {
        return RougeScore::ZERO;
    }
    let lcs = lcs_table(hyp_tokens, ref_tokens)[hyp_tokens.len()][ref_tokens.len()];
    RougeScore::from_overlap(lcs as f64, hyp_tokens.len() as f64, ref_tokens.len() as f64)
}

/// Summary-level ROUGE-L: for each reference sentence, the union of LCS hit
/// positions across all candidate sentences; totals are summed over
/// sentences. Degenerates to [`rouge_l`] when both sides are one sentence.
pub fn rouge_lsum(hyp_sentences: &[&[String]], ref_sentences: &[&[String]]) -> RougeScore {
    let hyp_total: usize = hyp_sentences.iter().map(|s| s.len()).sum();
    let ref_total: usize = ref_sentences.iter().map(|s| s.len()).sum();
    if hyp_total == 0 || ref_total == 0 {
        return RougeScore::ZERO;
    }
    let mut union_hits = 0usize;
    for ref_sentence in ref_sentences {
        let mut hit = vec![false; ref_sentence.len()];
        for hyp_sentence in hyp_sentences {
            for idx in lcs_indices(ref_sentence, hyp_sentence) {
                hit[idx] = true;
            }
        }
        union_hits += hit.iter().filter(|&&h| h).count();
    }
    RougeScore::from_overlap(union_hits as f64, hyp_total as f64, ref_total as f64)
}

/// Raw match counts behind one variant's ratios; kept in reports so every
/// score can be re-derived by hand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct VariantCounts {
    /// N(hypothesis entities).
    pub n_hyp: usize,
    /// N(reference entities); `None` without a reference.
    pub n_target: Option<usize>,
    /// N(hypothesis entities matched in source).
    pub n_hyp_in_source: usize,
    /// N(hypothesis entities matched on the reference side).
    pub n_hyp_in_target: Option<usize>,
    /// N(reference entities matched on the hypothesis side).
    pub n_target_in_hyp: Option<usize>,
}

/// One counting variant's scores for a record. `None` = undefined
/// (denominator empty) or reference missing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariantScores {
    pub counts: VariantCounts,
    pub prec_source: Option<f64>,
    pub prec_target: Option<f64>,
    pub recall_target: Option<f64>,
    pub f1_target: Option<f64>,
}

/// ROUGE F1 values for a record (reference present).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RougeSet {
    pub rouge1: f64,
    pub rouge2: f64,
    pub rouge_l: f64,
    pub rouge_lsum: f64,
}

/// Everything measured for one record. Both counting variants are always
/// computed; consumers choose what to display.
#[derive(Debug, Clone, Serialize)]
pub struct RecordScores {
    pub id: String,
    /// `None` when the record has no reference summary.
    pub rouge: Option<RougeSet>,
    pub unique: VariantScores,
    pub non_unique: VariantScores,
}

/// Borrowed views of one record's texts and inventories, ready to score.
/// `target` is `None` when the record has no reference summary; reference
/// text and entities come and go together.
pub struct ScoreInputs<'a> {
    pub id: &'a str,
    pub source: &'a TokenizedText,
    pub hypothesis: &'a TokenizedText,
    pub hyp_entities: &'a EntityInventory,
    pub target: Option<(&'a TokenizedText, &'a EntityInventory)>,
}

fn score_variant(
    inputs: &ScoreInputs<'_>,
    mode: CountMode,
    stopwords: &StopwordSet,
    policy: MatchPolicy,
) -> VariantScores {
    let source_matcher = TextMatcher::new(inputs.source, stopwords, policy);
    let n_hyp = inputs.hyp_entities.count(mode);
    let n_hyp_in_source = count_matched_in_text(inputs.hyp_entities, &source_matcher, mode);
    let prec_source = ratio(n_hyp_in_source, n_hyp);

    let mut counts = VariantCounts {
        n_hyp,
        n_target: None,
        n_hyp_in_source,
        n_hyp_in_target: None,
        n_target_in_hyp: None,
    };
    let (mut prec_target, mut recall, mut f1) = (None, None, None);
    if let Some((target_text, target_entities)) = inputs.target {
        let n_target = target_entities.count(mode);
        let n_hyp_in_target = count_matched_in_target(
            inputs.hyp_entities,
            target_entities,
            target_text,
            mode,
            stopwords,
            policy,
        );
        let n_target_in_hyp = count_matched_in_target(
            target_entities,
            inputs.hyp_entities,
            inputs.hypothesis,
            mode,
            stopwords,
            policy,
        );
        counts.n_target = Some(n_target);
        counts.n_hyp_in_target = Some(n_hyp_in_target);
        counts.n_target_in_hyp = Some(n_target_in_hyp);
        prec_target = ratio(n_hyp_in_target, n_hyp);
        recall = ratio(n_target_in_hyp, n_target);
        f1 = prec_target.zip(recall).map(|(p, r)| f1_target(p, r));
    }
    VariantScores {
        counts,
        prec_source,
        prec_target,
        recall_target: recall,
        f1_target: f1,
    }
}

/// Scores one record: both entity-metric variants, plus ROUGE when a
/// reference is present.
pub fn score_record(
    inputs: &ScoreInputs<'_>,
    stopwords: &StopwordSet,
    policy: MatchPolicy,
) -> RecordScores {
    let rouge = inputs.target.map(|(target_text, _)| {
        let hyp_sents: Vec<&[String]> = inputs.hypothesis.sentences().collect();
        let ref_sents: Vec<&[String]> = target_text.sentences().collect();
        RougeSet {
            rouge1: rouge_n(&inputs.hypothesis.tokens, &target_text.tokens, 1)
                .expect("n >= 1")
                .f1,
            rouge2: rouge_n(&inputs.hypothesis.tokens, &target_text.tokens, 2)
                .expect("n >= 1")
                .f1,
            rouge_l: rouge_l(&inputs.hypothesis.tokens, &target_text.tokens).f1,
            rouge_lsum: rouge_lsum(&hyp_sents, &ref_sents).f1,
        }
    });
    RecordScores {
        id: inputs.id.to_string(),
        rouge,
        unique: score_variant(inputs, CountMode::Unique, stopwords, policy),
        non_unique: score_variant(inputs, CountMode::NonUnique, stopwords, policy),
    }
}

/// Macro average of one metric across records: mean of defined values, plus
/// how many records were defined/undefined. The mean is computed over
/// value-sorted inputs so it is bit-identical under any record ordering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanTally {
    /// Mean of defined per-record values, as a ratio in `[0, 1]`.
    pub mean: Option<f64>,
    /// `mean` as a percentage rounded to two decimals (reporting form).
    pub mean_pct: Option<f64>,
    pub defined: usize,
    pub undefined: usize,
}

fn tally<I: Iterator<Item = Option<f64>>>(values: I) -> MeanTally {
    let mut defined = Vec::new();
    let mut undefined = 0usize;
    for value in values {
        match value {
            Some(v) => defined.push(v),
            None => undefined += 1,
        }
    }
    defined.sort_by(f64::total_cmp);
    let mean = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    MeanTally {
        mean,
        mean_pct: mean.map(|m| (m * 10_000.0).round() / 100.0),
        defined: defined.len(),
        undefined,
    }
}

/// Corpus-level macro averages, one tally per metric and variant.
#[derive(Debug, Clone, Serialize)]
pub struct AggregateScores {
    pub records: usize,
    pub rouge1: MeanTally,
    pub rouge2: MeanTally,
    pub rouge_l: MeanTally,
    pub rouge_lsum: MeanTally,
    pub prec_source_u: MeanTally,
    pub prec_source_nu: MeanTally,
    pub prec_target_u: MeanTally,
    pub prec_target_nu: MeanTally,
    pub recall_target_u: MeanTally,
    pub recall_target_nu: MeanTally,
    pub f1_target_u: MeanTally,
    pub f1_target_nu: MeanTally,
}

/// A scored corpus: the policy used, per-record scores in input order, and
/// macro aggregates.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub policy: MatchPolicy,
    pub aggregate: AggregateScores,
    pub records: Vec<RecordScores>,
}

/// Aggregates per-record scores into a report.
///
/// # Errors
/// An empty record list is an invalid argument: an average over nothing has
/// no meaning and silently returning zeros would fabricate a score.
pub fn aggregate(records: Vec<RecordScores>, policy: MatchPolicy) -> Result<MetricReport> {
    if records.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot aggregate an empty record list".into(),
        ));
    }
    let t = |f: &dyn Fn(&RecordScores) -> Option<f64>| tally(records.iter().map(f));
    let aggregate = AggregateScores {
        records: records.len(),
        rouge1: t(&|r| r.rouge.map(|g| g.rouge1)),
        rouge2: t(&|r| r.rouge.map(|g| g.rouge2)),
        rouge_l: t(&|r| r.rouge.map(|g| g.rouge_l)),
        rouge_lsum: t(&|r| r.rouge.map(|g| g.rouge_lsum)),
        prec_source_u: t(&|r| r.unique.prec_source),
        prec_source_nu: t(&|r| r.non_unique.prec_source),
        prec_target_u: t(&|r| r.unique.prec_target),
        prec_target_nu: t(&|r| r.non_unique.prec_target),
        recall_target_u: t(&|r| r.unique.recall_target),
        recall_target_nu: t(&|r| r.non_unique.recall_target),
        f1_target_u: t(&|r| r.unique.f1_target),
        f1_target_nu: t(&|r| r.non_unique.f1_target),
    };
    Ok(MetricReport {
        policy,
        aggregate,
        records,
    })
}

/// Which variant columns a rendered table includes; `None` means both.
pub type VariantFilter = Option<CountMode>;

fn pct_cell(tally: &MeanTally) -> String {
    match tally.mean_pct {
        Some(pct) => format!("{pct:.2}"),
        None => "undef".to_string(),
    }
}

/// Renders the aggregate block as a fixed-width text table with one row.
/// METEOR and BERTScore columns are kept for layout parity with common
/// summarization reports but always read "n/a" (not computed here).
pub fn render_table(report: &MetricReport, label: &str, variants: VariantFilter) -> String {
    let agg = &report.aggregate;
    let mut columns: Vec<(String, String)> = vec![
        ("R-1".into(), pct_cell(&agg.rouge1)),
        ("R-2".into(), pct_cell(&agg.rouge2)),
        ("R-L".into(), pct_cell(&agg.rouge_l)),
        ("R-LSum".into(), pct_cell(&agg.rouge_lsum)),
        ("METEOR".into(), "n/a".into()),
        ("BERTScore".into(), "n/a".into()),
    ];
    let unique_cols = |cols: &mut Vec<(String, String)>| {
        cols.push(("prec-s(U)".into(), pct_cell(&agg.prec_source_u)));
        cols.push(("prec-t(U)".into(), pct_cell(&agg.prec_target_u)));
        cols.push(("recall-t(U)".into(), pct_cell(&agg.recall_target_u)));
        cols.push(("F1-t(U)".into(), pct_cell(&agg.f1_target_u)));
    };
    let non_unique_cols = |cols: &mut Vec<(String, String)>| {
        cols.push(("prec-s(NU)".into(), pct_cell(&agg.prec_source_nu)));
        cols.push(("prec-t(NU)".into(), pct_cell(&agg.prec_target_nu)));
        cols.push(("recall-t(NU)".into(), pct_cell(&agg.recall_target_nu)));
        cols.push(("F1-t(NU)".into(), pct_cell(&agg.f1_target_nu)));
    };
    match variants {
        Some(CountMode::Unique) => unique_cols(&mut columns),
        Some(CountMode::NonUnique) => non_unique_cols(&mut columns),
        None => {
            unique_cols(&mut columns);
            non_unique_cols(&mut columns);
        }
    }

    let label_width = "model".len().max(label.len());
    let mut header = format!("{:<label_width$}", "model");
    let mut row = format!("{:<label_width$}", label);
    for (name, value) in &columns {
        let width = name.len().max(value.len());
        header.push_str(&format!("  {name:>width$}"));
        row.push_str(&format!("  {value:>width$}"));
    }
    let mut out = format!("{header}\n{row}\n");
    out.push_str(&format!("records: {}", agg.records));
    let undefined: Vec<String> = [
        ("prec-s(U)", agg.prec_source_u.undefined),
        ("prec-s(NU)", agg.prec_source_nu.undefined),
        ("F1-t(U)", agg.f1_target_u.undefined),
        ("F1-t(NU)", agg.f1_target_nu.undefined),
        ("rouge", agg.rouge1.undefined),
    ]
    .iter()
    .filter(|(_, n)| *n > 0)
    .map(|(name, n)| format!("{name}: {n}"))
    .collect();
    if !undefined.is_empty() {
        out.push_str(&format!("  (undefined — {})", undefined.join(", ")));
    }
    out.push('\n');
    out
}
