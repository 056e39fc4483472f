//! Corpus records and the hallucination-mitigation transforms.
//!
//! The transforms implement a data-centric recipe for reducing entity
//! hallucination in summarization training sets:
//!
//! * [`clean_text`] — conservative noise removal (case, citation markers,
//!   punctuation, bare numerals, symbol runs), idempotent by construction;
//! * [`enforce_length`] — whitespace-token budgets for source and target
//!   with truncate/drop/flag actions;
//! * [`filter_sentences`] — drop every target sentence containing an entity
//!   that cannot be matched back to the source (a summary-worthy fact the
//!   input never stated); a record whose summary empties out is dropped
//!   entirely;
//! * [`filter_pairs`] — drop whole records whose target-side source
//!   precision falls below a threshold;
//! * [`jaens_augment`] / [`jaens_split`] — prefix targets with their ordered
//!   entity chain behind a separator token, so a model first plans which
//!   entities to mention, and recover `(chain, summary)` from generated
//!   text;
//! * [`corpus_stats`] — distribution summaries used to verify what a
//!   transform did to a corpus.

use serde::{Deserialize, Serialize};

use crate::entities::{CountMode, EntityExtractor, EntityInventory};
use crate::matching::{MatchPolicy, TextMatcher};
use crate::metrics::precision_source;
use crate::textproc::{split_sentences, tokenize, StopwordSet};
use crate::{Error, Result};

/// One summarization example. `source`/`target` default to empty strings so
/// partially-populated corpora still parse; operations that need a field
/// validate it themselves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    #[serde(default)]
    pub source: String,
    #[serde(default)]
    pub target: String,
    /// Model output, present on scoring corpora.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<String>,
    /// Pre-augmentation target, set by the augment transform.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original_target: Option<String>,
    /// Gold entity annotations, when the corpus has them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entities_source: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entities_target: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entities_hypothesis: Option<Vec<String>>,
}

// ---------------------------------------------------------------------------
// Cleaning
// ---------------------------------------------------------------------------

/// Which removal classes [`clean_text`] applies. Every class is individually
/// toggleable; the default enables all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningPolicy {
    /// Lowercase the text.
    pub lowercase: bool,
    /// Remove bracketed citation markers like `[12]`, `(3)`, `[1, 2]`.
    pub strip_citation_markers: bool,
    /// Replace ASCII punctuation with spaces.
    pub strip_punctuation: bool,
    /// Replace non-alphanumeric symbols (±, ≤, °, …) with spaces.
    pub strip_symbols: bool,
    /// Drop tokens consisting solely of digits.
    pub drop_numeral_tokens: bool,
}

impl Default for CleaningPolicy {
    fn default() -> Self {
        Self {
            lowercase: true,
            strip_citation_markers: true,
            strip_punctuation: true,
            strip_symbols: true,
            drop_numeral_tokens: true,
        }
    }
}

fn citation_marker_regex() -> &'static regex::Regex {
    use std::sync::OnceLock;
    static RE: OnceLock<regex::Regex> = OnceLock::new();
    RE.get_or_init(|| {
        regex::Regex::new(r"[\[(]\s*\d+(\s*[-,]\s*\d+)*\s*[\])]").expect("static pattern compiles")
    })
}

/// Cleans raw text per the policy. The pipeline order is fixed (lowercase,
/// citations, punctuation, symbols, numeral tokens, whitespace collapse) and
/// the result is idempotent: cleaning a cleaned text is a no-op.
pub fn clean_text(raw: &str, policy: &CleaningPolicy) -> String {
    let mut text = if policy.lowercase {
        raw.to_lowercase()
    } else {
        raw.to_string()
    };
    if policy.strip_citation_markers {
        text = citation_marker_regex().replace_all(&text, " ").into_owned();
    }
    if policy.strip_punctuation || policy.strip_symbols {
        text = text
            .chars()
            .map(|ch| {
                let is_symbol = !ch.is_alphanumeric() && !ch.is_whitespace();
                if is_symbol
                    && ((policy.strip_punctuation && ch.is_ascii_punctuation())
                        || (policy.strip_symbols && !ch.is_ascii_punctuation()))
                {
                    ' '
                } else {
                    ch
                }
            })
            .collect();
    }
    let words = text
        .split_whitespace()
        .filter(|w| !policy.drop_numeral_tokens || !w.chars().all(|c| c.is_ascii_digit()));
    words.collect::<Vec<_>>().join(" ")
}

// ---------------------------------------------------------------------------
// Length budgets
// ---------------------------------------------------------------------------

/// What [`enforce_length`] does to a record that violates a budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthAction {
    /// Cut the text after the budgeted token (over-length only; a target
    /// below the minimum cannot be fixed and is flagged instead).
    Truncate,
    /// Drop the record.
    Drop,
    /// Keep the record unchanged and record the violation.
    Flag,
}

/// Whitespace-token budgets. Defaults match long-document summarization
/// practice: 8192 source / 512 target maximum, 100 target minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthPolicy {
    pub max_source_tokens: usize,
    pub max_target_tokens: usize,
    pub min_target_tokens: usize,
    pub action: LengthAction,
}

impl Default for LengthPolicy {
    fn default() -> Self {
        Self {
            max_source_tokens: 8192,
            max_target_tokens: 512,
            min_target_tokens: 100,
            action: LengthAction::Truncate,
        }
    }
}

/// A budget violation found by [`enforce_length`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthViolation {
    SourceOverBudget,
    TargetOverBudget,
    TargetUnderMinimum,
}

/// Result of applying a length policy to one record.
#[derive(Debug, Clone)]
pub struct LengthOutcome {
    /// The surviving record; `None` when the action dropped it.
    pub record: Option<CorpusRecord>,
    /// Violations found against the original record, in field order.
    pub violations: Vec<LengthViolation>,
    /// True when a kept record's text was changed (truncation).
    pub modified: bool,
}

/// Counts whitespace-delimited tokens (the budget unit: cheap, and
/// independent of normalization choices).
pub fn whitespace_token_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Cuts `text` after its `max`-th whitespace token, preserving the original
/// bytes up to that point. Returns the input unchanged when within budget.
fn truncate_to_tokens(text: &str, max: usize) -> &str {
    let mut seen = 0usize;
    let mut end = 0usize;
    let mut in_token = false;
    for (i, ch) in text.char_indices() {
        if ch.is_whitespace() {
            in_token = false;
        } else {
            if !in_token {
                in_token = true;
                seen += 1;
                if seen > max {
                    return &text[..end];
                }
            }
            end = i + ch.len_utf8();
        }
    }
    text
}

/// Applies whitespace-token budgets to a record's source and target.
///
/// # Errors
/// Budgets must be positive with `min_target_tokens <= max_target_tokens`.
pub fn enforce_length(record: &CorpusRecord, policy: &LengthPolicy) -> Result<LengthOutcome> {
    if policy.max_source_tokens == 0 || policy.max_target_tokens == 0 {
        return Err(Error::InvalidArgument(
            "length budgets must be positive".into(),
        ));
    }
    if policy.min_target_tokens > policy.max_target_tokens {
        return Err(Error::InvalidArgument(format!(
            "minimum target budget {} exceeds maximum {}",
            policy.min_target_tokens, policy.max_target_tokens
        )));
    }

    let mut violations = Vec::new();
    if whitespace_token_count(&record.source) > policy.max_source_tokens {
        violations.push(LengthViolation::SourceOverBudget);
    }
    let target_tokens = whitespace_token_count(&record.target);
    if target_tokens > policy.max_target_tokens {
        violations.push(LengthViolation::TargetOverBudget);
    }
    if target_tokens < policy.min_target_tokens {
        violations.push(LengthViolation::TargetUnderMinimum);
    }

    if violations.is_empty() {
        return Ok(LengthOutcome {
            record: Some(record.clone()),
            violations,
            modified: false,
        });
    }
    match policy.action {
        LengthAction::Drop => Ok(LengthOutcome {
            record: None,
            violations,
            modified: false,
        }),
        LengthAction::Flag => Ok(LengthOutcome {
            record: Some(record.clone()),
            violations,
            modified: false,
        }),
        LengthAction::Truncate => {
            let mut kept = record.clone();
            let mut modified = false;
            if violations.contains(&LengthViolation::SourceOverBudget) {
                kept.source =
                    truncate_to_tokens(&kept.source, policy.max_source_tokens).to_string();
                modified = true;
            }
            if violations.contains(&LengthViolation::TargetOverBudget) {
                kept.target =
                    truncate_to_tokens(&kept.target, policy.max_target_tokens).to_string();
                modified = true;
            }
            // TargetUnderMinimum cannot be repaired by truncation; it stays
            // in `violations` as a flag on the kept record.
            Ok(LengthOutcome {
                record: Some(kept),
                violations,
                modified,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Entity-based filtering
// ---------------------------------------------------------------------------

/// Why a record left (or was rewritten by) a filtering pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DropReason {
    /// Kept, but at least one target sentence was removed.
    SentenceFilter,
    /// Dropped: target-side source precision fell below the threshold.
    PrecThreshold,
    /// Dropped: every target sentence was removed (covers single-sentence
    /// summaries whose one sentence failed the match).
    EmptyAfterFilter,
}

/// Sentence dropped by [`filter_sentences`], with the entities that failed
/// to match the source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedSentence {
    /// Index into the original sentence list.
    pub index: usize,
    /// Canonical keys of the unmatched entities.
    pub unmatched_keys: Vec<String>,
}

/// Audit entry for one record passed through a filtering strategy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterOutcome {
    pub record_id: String,
    /// Indices of kept target sentences (sentence strategy).
    pub kept_sentence_indices: Vec<usize>,
    /// Dropped sentences with diagnoses (sentence strategy).
    pub dropped_sentences: Vec<DroppedSentence>,
    /// False when the record is omitted from the output corpus.
    pub record_kept: bool,
    /// Set when anything was dropped; see [`DropReason`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<DropReason>,
    /// Target-side source precision (pair strategy).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prec_source: Option<f64>,
    /// Free-form audit flags (e.g. undefined precision kept by policy).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl FilterOutcome {
    fn new(record_id: &str) -> Self {
        Self {
            record_id: record_id.to_string(),
            kept_sentence_indices: Vec::new(),
            dropped_sentences: Vec::new(),
            record_kept: true,
            reason: None,
            prec_source: None,
            flags: Vec::new(),
        }
    }
}

/// Keeps each target sentence only if **every** entity extracted from it
/// matches the source document; one unmatched entity removes the whole
/// sentence. Sentences without entities are kept vacuously. Returns the
/// rewritten record (`None` when no sentence survived) plus an audit entry.
///
/// The kept target is the surviving sentences joined by single spaces, in
/// their original order; the source text is never modified.
///
/// # Errors
/// A record with an empty target is an invalid argument.
pub fn filter_sentences(
    record: &CorpusRecord,
    extractor: &dyn EntityExtractor,
    stopwords: &StopwordSet,
    policy: MatchPolicy,
) -> Result<(Option<CorpusRecord>, FilterOutcome)> {
    if record.target.trim().is_empty() {
        return Err(Error::InvalidArgument(format!(
            "record {:?} has an empty target",
            record.id
        )));
    }
    let source_text = tokenize(&record.source);
    let matcher = TextMatcher::new(&source_text, stopwords, policy);

    let sentences = split_sentences(&record.target);
    let mut outcome = FilterOutcome::new(&record.id);
    let mut kept = Vec::with_capacity(sentences.len());
    for (index, sentence) in sentences.iter().enumerate() {
        let sentence_text = tokenize(sentence);
        let inventory = extractor.extract(&sentence_text);
        let unmatched_keys: Vec<String> = inventory
            .mentions()
            .iter()
            .filter(|m| !matcher.matches_tokens(&m.tokens))
            .map(|m| m.key.clone())
            .collect();
        if unmatched_keys.is_empty() {
            outcome.kept_sentence_indices.push(index);
            kept.push(sentence.as_str());
        } else {
            outcome.dropped_sentences.push(DroppedSentence {
                index,
                unmatched_keys,
            });
        }
    }

    if kept.is_empty() {
        outcome.record_kept = false;
        outcome.reason = Some(DropReason::EmptyAfterFilter);
        return Ok((None, outcome));
    }
    if !outcome.dropped_sentences.is_empty() {
        outcome.reason = Some(DropReason::SentenceFilter);
    }
    let mut filtered = record.clone();
    filtered.target = kept.join(" ");
    Ok((Some(filtered), outcome))
}

/// Keeps a record only when the source precision of its **target** entities
/// reaches `threshold`. A target without entities has undefined precision
/// and is kept with a flag (no evidence of hallucination either way).
///
/// # Errors
/// `threshold` must be within `[0, 1]`.
pub fn filter_pairs(
    record: &CorpusRecord,
    threshold: f64,
    mode: CountMode,
    extractor: &dyn EntityExtractor,
    stopwords: &StopwordSet,
    policy: MatchPolicy,
) -> Result<FilterOutcome> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidArgument(format!(
            "pair-filter threshold must be in [0, 1], got {threshold}"
        )));
    }
    let source_text = tokenize(&record.source);
    let target_text = tokenize(&record.target);
    let target_entities = extractor.extract(&target_text);
    let prec = precision_source(&target_entities, &source_text, mode, stopwords, policy);

    let mut outcome = FilterOutcome::new(&record.id);
    outcome.prec_source = prec;
    match prec {
        Some(p) if p >= threshold => {}
        Some(_) => {
            outcome.record_kept = false;
            outcome.reason = Some(DropReason::PrecThreshold);
        }
        None => outcome.flags.push("undefined-precision-kept".to_string()),
    }
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// Entity-chain target augmentation
// ---------------------------------------------------------------------------

/// Default separator between the entity chain and the summary.
pub const DEFAULT_SEPARATOR: &str = "<sep>";

/// A target rewritten as `entity chain + separator + summary`, so a model
/// trained on it plans its entities before writing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JaensTarget {
    /// Deduplicated canonical entity keys in first-occurrence order.
    pub entity_chain: Vec<String>,
    pub separator: String,
    /// The original summary, trimmed of surrounding whitespace (so
    /// serialization round-trips exactly).
    pub summary: String,
}

impl JaensTarget {
    /// `"e1, e2 <sep> summary"`; with an empty chain, `"<sep> summary"`.
    pub fn serialize(&self) -> String {
        if self.entity_chain.is_empty() {
            format!("{} {}", self.separator, self.summary)
        } else {
            format!(
                "{} {} {}",
                self.entity_chain.join(", "),
                self.separator,
                self.summary
            )
        }
    }
}

/// Builds the augmented form of a record's target: the chain is the target's
/// entity keys, deduplicated, in first-occurrence order.
///
/// # Errors
/// * Empty target or empty separator: invalid argument.
/// * Separator occurring inside the chain or the summary: refused, because
///   [`jaens_split`] could no longer recover the parts unambiguously.
pub fn jaens_augment(
    record: &CorpusRecord,
    extractor: &dyn EntityExtractor,
    separator: &str,
) -> Result<JaensTarget> {
    if separator.is_empty() {
        return Err(Error::InvalidArgument("separator must be non-empty".into()));
    }
    let summary = record.target.trim();
    if summary.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "record {:?} has an empty target",
            record.id
        )));
    }
    let target_text = tokenize(&record.target);
    let entity_chain: Vec<String> = extractor
        .extract(&target_text)
        .keys()
        .iter()
        .cloned()
        .collect();
    if entity_chain.join(", ").contains(separator) {
        return Err(Error::SeparatorCollision {
            separator: separator.to_string(),
            location: "the entity chain",
            record_id: record.id.clone(),
        });
    }
    if summary.contains(separator) {
        return Err(Error::SeparatorCollision {
            separator: separator.to_string(),
            location: "the summary text",
            record_id: record.id.clone(),
        });
    }
    Ok(JaensTarget {
        entity_chain,
        separator: separator.to_string(),
        summary: summary.to_string(),
    })
}

/// `(chain, summary)` recovered from generated text by [`jaens_split`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JaensSplit {
    pub entity_chain: Vec<String>,
    pub summary: String,
    /// False when the text contained no separator; the whole text is then
    /// treated as the summary with an empty chain.
    pub separator_found: bool,
}

/// Splits generated text at the **first** separator occurrence. The prefix
/// is parsed as a comma-separated entity chain (entries trimmed, empties
/// dropped); the suffix, minus leading whitespace, is the summary.
pub fn jaens_split(generated: &str, separator: &str) -> JaensSplit {
    match generated.find(separator) {
        None => JaensSplit {
            entity_chain: Vec::new(),
            summary: generated.to_string(),
            separator_found: false,
        },
        Some(pos) => {
            let entity_chain = generated[..pos]
                .split(',')
                .map(str::trim)
                .filter(|e| !e.is_empty())
                .map(String::from)
                .collect();
            JaensSplit {
                entity_chain,
                summary: generated[pos + separator.len()..].trim_start().to_string(),
                separator_found: true,
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Corpus statistics
// ---------------------------------------------------------------------------

/// Five-number-ish summary of a per-record count distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistSummary {
    pub mean: f64,
    pub median: f64,
    pub min: usize,
    pub max: usize,
}

impl DistSummary {
    fn from_counts(mut counts: Vec<usize>) -> Self {
        counts.sort_unstable();
        let n = counts.len();
        let mean = counts.iter().sum::<usize>() as f64 / n as f64;
        let median = if n % 2 == 1 {
            counts[n / 2] as f64
        } else {
            (counts[n / 2 - 1] + counts[n / 2]) as f64 / 2.0
        };
        Self {
            mean,
            median,
            min: counts[0],
            max: counts[n - 1],
        }
    }
}

/// Distribution summaries for a corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub records: usize,
    pub source_tokens: DistSummary,
    pub target_tokens: DistSummary,
    pub target_sentences: DistSummary,
    pub target_entities_unique: DistSummary,
    pub target_entities_non_unique: DistSummary,
}

/// Computes corpus distributions. Token counts are whitespace tokens (the
/// same unit as length budgets); sentence counts use the sentence splitter;
/// entity inventories come from `target_entities`, so annotated and
/// heuristic corpora use the same code path.
///
/// # Errors
/// An empty corpus is an invalid argument.
pub fn corpus_stats(
    records: &[CorpusRecord],
    target_entities: &dyn Fn(&CorpusRecord) -> EntityInventory,
) -> Result<CorpusStats> {
    if records.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot summarize an empty corpus".into(),
        ));
    }
    let mut source_tokens = Vec::with_capacity(records.len());
    let mut target_tokens = Vec::with_capacity(records.len());
    let mut target_sentences = Vec::with_capacity(records.len());
    let mut unique = Vec::with_capacity(records.len());
    let mut non_unique = Vec::with_capacity(records.len());
    for record in records {
        source_tokens.push(whitespace_token_count(&record.source));
        target_tokens.push(whitespace_token_count(&record.target));
        target_sentences.push(split_sentences(&record.target).len());
        let inventory = target_entities(record);
        unique.push(inventory.count(CountMode::Unique));
        non_unique.push(inventory.count(CountMode::NonUnique));
    }
    Ok(CorpusStats {
        records: records.len(),
        source_tokens: DistSummary::from_counts(source_tokens),
        target_tokens: DistSummary::from_counts(target_tokens),
        target_sentences: DistSummary::from_counts(target_sentences),
        target_entities_unique: DistSummary::from_counts(unique),
        target_entities_non_unique: DistSummary::from_counts(non_unique),
    })
}
