//! Acceptance suite: one test per shipped guarantee. Each test prints a
//! single `[PASS] criterion N` line on success (visible with
//! `cargo test --test acceptance -- --nocapture`); a failure panics with the
//! criterion number in the test name.
//!
//! Criterion 1 checks the entity metrics against a brute-force oracle that
//! is re-implemented here from scratch (exhaustive component enumeration,
//! no shared code with the library), so an agreement is meaningful.

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::process::Command;

use factsum::dataset::{
    filter_pairs, filter_sentences, jaens_augment, jaens_split, CorpusRecord, DropReason,
    DEFAULT_SEPARATOR,
};
use factsum::entities::{ingest_annotations, CountMode, EntityExtractor, HeuristicExtractor};
use factsum::matching::{count_matched_in_text, MatchPolicy, TargetMatchMode, TextMatcher};
use factsum::metrics::{
    aggregate, f1_target, precision_source, rouge_l, rouge_lsum, rouge_n, score_record,
    RecordScores, ScoreInputs, VariantScores,
};
use factsum::textproc::{tokenize, StopwordSet};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

// ---------------------------------------------------------------------------
// Shared generator vocabulary
// ---------------------------------------------------------------------------

/// Words the generator may use that the default stop list contains.
const STOP_VOCAB: &[&str] = &["the", "of", "and", "in", "was", "to"];
/// Content words, guaranteed absent from the default stop list.
const CONTENT_VOCAB: &[&str] = &[
    "alpha",
    "beta",
    "gamma",
    "delta",
    "melanoma",
    "clinic",
    "x-ray",
    "zeta",
    "screening",
    "cohort",
];
/// Digit-only tokens, to exercise the numeric-unigram gate.
const NUMERIC_VOCAB: &[&str] = &["2005", "17"];

fn sanity_check_vocab(stops: &StopwordSet) {
    for w in STOP_VOCAB {
        assert!(stops.contains(w), "vocab word {w:?} must be a stopword");
    }
    for w in CONTENT_VOCAB.iter().chain(NUMERIC_VOCAB) {
        assert!(
            !stops.contains(w),
            "vocab word {w:?} must not be a stopword"
        );
    }
}

fn any_word(rng: &mut StdRng) -> &'static str {
    let roll: f64 = rng.gen();
    if roll < 0.60 {
        CONTENT_VOCAB[rng.gen_range(0..CONTENT_VOCAB.len())]
    } else if roll < 0.85 {
        STOP_VOCAB[rng.gen_range(0..STOP_VOCAB.len())]
    } else {
        NUMERIC_VOCAB[rng.gen_range(0..NUMERIC_VOCAB.len())]
    }
}

fn word_seq(rng: &mut StdRng, len: usize) -> Vec<String> {
    (0..len).map(|_| any_word(rng).to_string()).collect()
}

/// `word_seq` with a length drawn from `lo..=hi`.
fn words(rng: &mut StdRng, lo: usize, hi: usize) -> Vec<String> {
    let len = rng.gen_range(lo..=hi);
    word_seq(rng, len)
}

fn record(id: &str, source: &str, target: &str, hypothesis: Option<&str>) -> CorpusRecord {
    CorpusRecord {
        id: id.to_string(),
        source: source.to_string(),
        target: target.to_string(),
        hypothesis: hypothesis.map(str::to_string),
        original_target: None,
        entities_source: None,
        entities_target: None,
        entities_hypothesis: None,
    }
}

// ---------------------------------------------------------------------------
// Brute-force oracle (independent re-implementation)
// ---------------------------------------------------------------------------

mod oracle {
    use std::collections::HashSet;

    pub struct Policy {
        pub block_stop_unigrams: bool,
        pub block_numeric_unigrams: bool,
        pub exact_key_target: bool,
    }

    fn is_numeric(token: &str) -> bool {
        !token.is_empty() && token.chars().all(|c| c.is_ascii_digit())
    }

    /// Exhaustive partial match: every contiguous component of the entity is
    /// tried at every document position. No ordering tricks, no caching.
    pub fn entity_matches(
        entity: &[String],
        doc: &[String],
        stops: &HashSet<&'static str>,
        policy: &Policy,
    ) -> bool {
        for i in 0..entity.len() {
            for j in (i + 1)..=entity.len() {
                let component = &entity[i..j];
                if component.len() == 1 {
                    let token = component[0].as_str();
                    if policy.block_stop_unigrams && stops.contains(token) {
                        continue;
                    }
                    if policy.block_numeric_unigrams && is_numeric(token) {
                        continue;
                    }
                }
                if doc.len() >= component.len() {
                    for start in 0..=(doc.len() - component.len()) {
                        if &doc[start..start + component.len()] == component {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    fn key(tokens: &[String]) -> String {
        tokens.join(" ")
    }

    /// Distinct canonical keys in first-occurrence order.
    fn unique_keys(mentions: &[Vec<String>]) -> Vec<Vec<String>> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for m in mentions {
            if seen.insert(key(m)) {
                out.push(m.clone());
            }
        }
        out
    }

    fn ratio(matched: usize, total: usize) -> Option<f64> {
        (total > 0).then(|| matched as f64 / total as f64)
    }

    fn f1(p: f64, r: f64) -> f64 {
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    #[derive(Debug, PartialEq)]
    pub struct Variant {
        pub n_hyp: usize,
        pub n_target: Option<usize>,
        pub n_hyp_in_source: usize,
        pub n_hyp_in_target: Option<usize>,
        pub n_target_in_hyp: Option<usize>,
        pub prec_source: Option<f64>,
        pub prec_target: Option<f64>,
        pub recall_target: Option<f64>,
        pub f1_target: Option<f64>,
    }

    /// Counts how many of `items` match the other side of a target pair.
    fn count_in_target(
        items: &[Vec<String>],
        other_items: &[Vec<String>],
        other_text: &[String],
        stops: &HashSet<&'static str>,
        policy: &Policy,
    ) -> usize {
        if policy.exact_key_target {
            let other_keys: HashSet<String> = other_items.iter().map(|m| key(m)).collect();
            items
                .iter()
                .filter(|m| other_keys.contains(&key(m)))
                .count()
        } else {
            items
                .iter()
                .filter(|m| entity_matches(m, other_text, stops, policy))
                .count()
        }
    }

    /// The eight entity metrics for one record, one counting variant.
    ///
    /// `unique` selects set counting (distinct keys) over mention counting.
    #[allow(clippy::too_many_arguments)]
    pub fn score_variant(
        hyp_mentions: &[Vec<String>],
        hyp_text: &[String],
        source: &[String],
        target: Option<(&[String], &[Vec<String>])>,
        stops: &HashSet<&'static str>,
        policy: &Policy,
        unique: bool,
    ) -> Variant {
        let hyp_items = if unique {
            unique_keys(hyp_mentions)
        } else {
            hyp_mentions.to_vec()
        };
        let n_hyp = hyp_items.len();
        let n_hyp_in_source = hyp_items
            .iter()
            .filter(|m| entity_matches(m, source, stops, policy))
            .count();

        let mut v = Variant {
            n_hyp,
            n_target: None,
            n_hyp_in_source,
            n_hyp_in_target: None,
            n_target_in_hyp: None,
            prec_source: ratio(n_hyp_in_source, n_hyp),
            prec_target: None,
            recall_target: None,
            f1_target: None,
        };
        if let Some((target_text, target_mentions)) = target {
            let target_items = if unique {
                unique_keys(target_mentions)
            } else {
                target_mentions.to_vec()
            };
            let n_target = target_items.len();
            let n_hyp_in_target =
                count_in_target(&hyp_items, &target_items, target_text, stops, policy);
            let n_target_in_hyp =
                count_in_target(&target_items, &hyp_items, hyp_text, stops, policy);
            v.n_target = Some(n_target);
            v.n_hyp_in_target = Some(n_hyp_in_target);
            v.n_target_in_hyp = Some(n_target_in_hyp);
            v.prec_target = ratio(n_hyp_in_target, n_hyp);
            v.recall_target = ratio(n_target_in_hyp, n_target);
            v.f1_target = v.prec_target.zip(v.recall_target).map(|(p, r)| f1(p, r));
        }
        v
    }
}

// ---------------------------------------------------------------------------
// Criterion 1: metric–oracle equivalence
// ---------------------------------------------------------------------------

struct Instance {
    source: Vec<String>,
    hyp_text: Vec<String>,
    hyp_entities: Vec<Vec<String>>,
    target: Option<(Vec<String>, Vec<Vec<String>>)>,
    policy: MatchPolicy,
}

fn random_policy(rng: &mut StdRng) -> MatchPolicy {
    MatchPolicy {
        unigram_stopword_block: rng.gen(),
        numeric_unigram_block: rng.gen(),
        target_match_mode: if rng.gen() {
            TargetMatchMode::ExactKey
        } else {
            TargetMatchMode::PartialText
        },
    }
}

/// An entity is either random tokens or a contiguous slice of a text, so a
/// healthy share of instances contain genuine matches.
fn random_entity(rng: &mut StdRng, texts: &[&[String]]) -> Vec<String> {
    let nonempty: Vec<&&[String]> = texts.iter().filter(|t| !t.is_empty()).collect();
    if !nonempty.is_empty() && rng.gen_bool(0.5) {
        let text = nonempty[rng.gen_range(0..nonempty.len())];
        let len = rng.gen_range(1..=3.min(text.len()));
        let start = rng.gen_range(0..=text.len() - len);
        return text[start..start + len].to_vec();
    }
    words(rng, 1, 3)
}

fn random_instance(rng: &mut StdRng) -> Instance {
    let source = if rng.gen_bool(0.1) {
        Vec::new()
    } else {
        words(rng, 1, 30)
    };
    let hyp_text = words(rng, 0, 15);
    let target = rng.gen_bool(0.75).then(|| {
        let text = words(rng, 0, 30);
        let n = rng.gen_range(0..=8);
        let mentions = (0..n)
            .map(|_| random_entity(rng, &[&text, &source]))
            .collect();
        (text, mentions)
    });
    let hyp_entities = {
        let mut texts: Vec<&[String]> = vec![&source, &hyp_text];
        if let Some((t, _)) = &target {
            texts.push(t);
        }
        let n = rng.gen_range(0..=8);
        (0..n).map(|_| random_entity(rng, &texts)).collect()
    };
    Instance {
        source,
        hyp_text,
        hyp_entities,
        target,
        policy: random_policy(rng),
    }
}

/// Hand-built boundary instances the random generator might miss.
fn edge_instances() -> Vec<Instance> {
    let strs = |v: &[&str]| -> Vec<String> { v.iter().map(|s| s.to_string()).collect() };
    let policy = |stop: bool, num: bool, exact: bool| MatchPolicy {
        unigram_stopword_block: stop,
        numeric_unigram_block: num,
        target_match_mode: if exact {
            TargetMatchMode::ExactKey
        } else {
            TargetMatchMode::PartialText
        },
    };
    vec![
        // No entities anywhere: every denominator is zero.
        Instance {
            source: strs(&["alpha", "beta"]),
            hyp_text: strs(&["alpha"]),
            hyp_entities: vec![],
            target: Some((strs(&["beta"]), vec![])),
            policy: policy(true, false, true),
        },
        // No reference side at all.
        Instance {
            source: strs(&["alpha", "beta"]),
            hyp_text: strs(&["alpha"]),
            hyp_entities: vec![strs(&["alpha"]), strs(&["alpha"])],
            target: None,
            policy: policy(true, false, true),
        },
        // Empty source document.
        Instance {
            source: vec![],
            hyp_text: strs(&["alpha"]),
            hyp_entities: vec![strs(&["alpha"])],
            target: Some((strs(&["alpha"]), vec![strs(&["alpha"])])),
            policy: policy(true, false, false),
        },
        // All-stopword entity: blocked as unigrams, matchable as a bigram.
        Instance {
            source: strs(&["the", "of", "alpha"]),
            hyp_text: strs(&["the", "of"]),
            hyp_entities: vec![strs(&["the", "of"]), strs(&["the"])],
            target: Some((strs(&["of", "the"]), vec![strs(&["the", "of"])])),
            policy: policy(true, false, false),
        },
        // Numeric unigram under both gate settings.
        Instance {
            source: strs(&["2005", "melanoma"]),
            hyp_text: strs(&["2005"]),
            hyp_entities: vec![strs(&["2005"]), strs(&["17"])],
            target: Some((strs(&["2005"]), vec![strs(&["2005"])])),
            policy: policy(true, true, false),
        },
        Instance {
            source: strs(&["2005", "melanoma"]),
            hyp_text: strs(&["2005"]),
            hyp_entities: vec![strs(&["2005"]), strs(&["17"])],
            target: Some((strs(&["2005"]), vec![strs(&["2005"])])),
            policy: policy(true, false, true),
        },
        // Duplicate mentions: U and NU must diverge.
        Instance {
            source: strs(&["melanoma", "clinic"]),
            hyp_text: strs(&["melanoma", "melanoma"]),
            hyp_entities: vec![strs(&["melanoma"]), strs(&["melanoma"]), strs(&["zeta"])],
            target: Some((
                strs(&["melanoma"]),
                vec![strs(&["melanoma"]), strs(&["melanoma"])],
            )),
            policy: policy(true, false, true),
        },
    ]
}

fn assert_variant_matches(
    instance_idx: usize,
    label: &str,
    got: &VariantScores,
    want: &oracle::Variant,
) {
    assert_eq!(
        (
            got.counts.n_hyp,
            got.counts.n_target,
            got.counts.n_hyp_in_source,
            got.counts.n_hyp_in_target,
            got.counts.n_target_in_hyp,
        ),
        (
            want.n_hyp,
            want.n_target,
            want.n_hyp_in_source,
            want.n_hyp_in_target,
            want.n_target_in_hyp,
        ),
        "instance {instance_idx} ({label}): counts diverge from oracle"
    );
    assert_eq!(
        (
            got.prec_source,
            got.prec_target,
            got.recall_target,
            got.f1_target
        ),
        (
            want.prec_source,
            want.prec_target,
            want.recall_target,
            want.f1_target
        ),
        "instance {instance_idx} ({label}): metrics diverge from oracle"
    );
}

#[test]
fn criterion_1_metric_oracle_equivalence() {
    let stops = StopwordSet::default_english();
    sanity_check_vocab(&stops);
    let oracle_stops: HashSet<&'static str> = STOP_VOCAB.iter().copied().collect();

    let mut rng = StdRng::seed_from_u64(0xFAC7_5001);
    let mut instances = edge_instances();
    instances.extend((0..1200).map(|_| random_instance(&mut rng)));
    let total = instances.len();

    for (idx, inst) in instances.into_iter().enumerate() {
        let source_text = tokenize(&inst.source.join(" "));
        let hyp_text = tokenize(&inst.hyp_text.join(" "));
        let hyp_strings: Vec<String> = inst.hyp_entities.iter().map(|m| m.join(" ")).collect();
        let hyp_inv = ingest_annotations(&hyp_strings);
        assert_eq!(
            hyp_inv.count(CountMode::NonUnique),
            inst.hyp_entities.len(),
            "instance {idx}: annotation ingestion must preserve every mention"
        );

        let target_built = inst.target.as_ref().map(|(text, mentions)| {
            let strings: Vec<String> = mentions.iter().map(|m| m.join(" ")).collect();
            (tokenize(&text.join(" ")), ingest_annotations(&strings))
        });
        let target_ref = target_built.as_ref().map(|(text, inv)| (text, inv));

        let scores = score_record(
            &ScoreInputs {
                id: "inst",
                source: &source_text,
                hypothesis: &hyp_text,
                hyp_entities: &hyp_inv,
                target: target_ref,
            },
            &stops,
            inst.policy,
        );

        let oracle_policy = oracle::Policy {
            block_stop_unigrams: inst.policy.unigram_stopword_block,
            block_numeric_unigrams: inst.policy.numeric_unigram_block,
            exact_key_target: inst.policy.target_match_mode == TargetMatchMode::ExactKey,
        };
        let oracle_target = inst
            .target
            .as_ref()
            .map(|(text, mentions)| (text.as_slice(), mentions.as_slice()));
        for (label, unique, got) in [
            ("unique", true, &scores.unique),
            ("non-unique", false, &scores.non_unique),
        ] {
            let want = oracle::score_variant(
                &inst.hyp_entities,
                &inst.hyp_text,
                &inst.source,
                oracle_target,
                &oracle_stops,
                &oracle_policy,
                unique,
            );
            assert_variant_matches(idx, label, got, &want);
        }
    }
    println!(
        "[PASS] criterion 1: all eight entity metrics equal the brute-force oracle exactly on {total} instances"
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: pair-filter guarantee
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_pair_filter_guarantee() {
    let stops = StopwordSet::default_english();
    let extractor = HeuristicExtractor::new(stops.clone());
    let policy = MatchPolicy::default();
    let mut rng = StdRng::seed_from_u64(0xFAC7_5002);

    let mut kept = 0usize;
    let mut dropped = 0usize;
    let mut undefined = 0usize;
    for i in 0..500 {
        // Source built from a random subset of the target's words plus noise,
        // so precision lands on both sides of the threshold.
        let target_words = words(&mut rng, 1, 10);
        let mut source_words: Vec<String> = target_words
            .iter()
            .filter(|_| rng.gen_bool(0.7))
            .cloned()
            .collect();
        source_words.extend(words(&mut rng, 1, 10));
        source_words.shuffle(&mut rng);

        let rec = record(
            &format!("p{i}"),
            &source_words.join(" "),
            &format!("{}.", target_words.join(" ")),
            None,
        );
        let mode = if rng.gen() {
            CountMode::Unique
        } else {
            CountMode::NonUnique
        };
        let outcome =
            filter_pairs(&rec, 1.0, mode, &extractor, &stops, policy).expect("valid threshold");

        // Re-derive the precision the filter should have used.
        let target_text = tokenize(&rec.target);
        let entities = extractor.extract(&target_text);
        let prec = precision_source(&entities, &tokenize(&rec.source), mode, &stops, policy);
        assert_eq!(outcome.prec_source, prec, "record p{i}: audited precision");

        match prec {
            Some(p) if p >= 1.0 => {
                assert!(outcome.record_kept, "record p{i}: prec 1.0 must be kept");
                assert_eq!(p, 1.0, "record p{i}: precision cannot exceed 1");
                kept += 1;
            }
            Some(p) => {
                assert!(!outcome.record_kept, "record p{i}: prec {p} < 1 must drop");
                assert_eq!(outcome.reason, Some(DropReason::PrecThreshold));
                dropped += 1;
            }
            None => {
                assert!(outcome.record_kept, "record p{i}: undefined prec is kept");
                assert!(
                    outcome
                        .flags
                        .iter()
                        .any(|f| f == "undefined-precision-kept"),
                    "record p{i}: undefined precision must be flagged"
                );
                undefined += 1;
            }
        }
    }
    assert!(
        kept > 0 && dropped > 0,
        "generator must exercise both outcomes"
    );
    println!(
        "[PASS] criterion 2: pair filter at threshold 1.0 kept {kept} records all at precision 1.0, \
         dropped {dropped} below it, flagged {undefined} undefined"
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: sentence-filter guarantees
// ---------------------------------------------------------------------------

/// Every mention extracted from the retained target matches the source.
fn assert_retained_target_grounded(rec: &CorpusRecord, extractor: &HeuristicExtractor) {
    let stops = StopwordSet::default_english();
    let policy = MatchPolicy::default();
    let source_text = tokenize(&rec.source);
    let matcher = TextMatcher::new(&source_text, &stops, policy);
    let target_text = tokenize(&rec.target);
    let inventory = extractor.extract(&target_text);
    for mention in inventory.mentions() {
        assert!(
            matcher.matches_tokens(&mention.tokens),
            "retained mention {:?} must match the source",
            mention.key
        );
    }
    let prec = precision_source(
        &inventory,
        &source_text,
        CountMode::NonUnique,
        &stops,
        policy,
    );
    assert!(
        prec.is_none() || prec == Some(1.0),
        "retained-target precision must be 1.0 (or vacuous), got {prec:?}"
    );
}

#[test]
fn criterion_3_sentence_filter_guarantees() {
    let stops = StopwordSet::default_english();
    let extractor = HeuristicExtractor::new(stops.clone());
    let policy = MatchPolicy::default();

    // Fixture A: ungrounded middle sentence is dropped, the rest survive.
    let rec = record(
        "a",
        "Melanoma incidence rose in Tehran in 2005. Screening was expanded.",
        "Melanoma incidence rose in Tehran. The cure was vitamin-zeta. Screening was expanded.",
        None,
    );
    let (filtered, outcome) = filter_sentences(&rec, &extractor, &stops, policy).unwrap();
    let filtered = filtered.expect("two grounded sentences remain");
    assert_eq!(outcome.kept_sentence_indices, vec![0, 2]);
    assert_eq!(outcome.dropped_sentences.len(), 1);
    assert_eq!(outcome.dropped_sentences[0].index, 1);
    assert!(outcome.dropped_sentences[0]
        .unmatched_keys
        .contains(&"vitamin-zeta".to_string()));
    assert_eq!(outcome.reason, Some(DropReason::SentenceFilter));
    assert_eq!(
        filtered.target,
        "Melanoma incidence rose in Tehran. Screening was expanded."
    );
    assert_retained_target_grounded(&filtered, &extractor);

    // Fixture B: a one-sentence target with one unmatched entity drops the
    // whole record.
    let rec = record(
        "b",
        "Screening was expanded.",
        "The cure was vitamin-zeta.",
        None,
    );
    let (filtered, outcome) = filter_sentences(&rec, &extractor, &stops, policy).unwrap();
    assert!(filtered.is_none());
    assert!(!outcome.record_kept);
    assert_eq!(outcome.reason, Some(DropReason::EmptyAfterFilter));

    // Fixture C: fully grounded target passes through unchanged.
    let rec = record(
        "c",
        "Melanoma incidence rose in Tehran.",
        "Melanoma incidence rose. Tehran.",
        None,
    );
    let (filtered, outcome) = filter_sentences(&rec, &extractor, &stops, policy).unwrap();
    assert_eq!(filtered.expect("kept").target, rec.target);
    assert!(outcome.dropped_sentences.is_empty());
    assert_eq!(outcome.reason, None);

    // Fixture D: a sentence without entities is kept vacuously.
    let rec = record("d", "Melanoma incidence rose.", "It was of the and.", None);
    let (filtered, outcome) = filter_sentences(&rec, &extractor, &stops, policy).unwrap();
    assert_eq!(filtered.expect("kept").target, rec.target);
    assert_eq!(outcome.kept_sentence_indices, vec![0]);

    // Randomized: kept indices are a strict subsequence partitioning the
    // sentence list, the retained target is fully grounded, and the filter
    // is idempotent.
    let mut rng = StdRng::seed_from_u64(0xFAC7_5003);
    let mut kept_records = 0usize;
    let mut dropped_records = 0usize;
    for i in 0..200 {
        let n_sentences = rng.gen_range(1..=5);
        let target = (0..n_sentences)
            .map(|_| format!("{}.", words(&mut rng, 1, 6).join(" ")))
            .collect::<Vec<_>>()
            .join(" ");
        let source = words(&mut rng, 1, 15).join(" ");
        let rec = record(&format!("r{i}"), &source, &target, None);

        let (filtered, outcome) = filter_sentences(&rec, &extractor, &stops, policy).unwrap();

        let mut seen: Vec<usize> = outcome.kept_sentence_indices.clone();
        seen.extend(outcome.dropped_sentences.iter().map(|d| d.index));
        seen.sort_unstable();
        assert_eq!(
            seen,
            (0..n_sentences).collect::<Vec<_>>(),
            "record r{i}: kept and dropped indices must partition the input"
        );
        assert!(
            outcome
                .kept_sentence_indices
                .windows(2)
                .all(|w| w[0] < w[1]),
            "record r{i}: kept indices must be strictly increasing"
        );

        match filtered {
            Some(kept_rec) => {
                kept_records += 1;
                assert_retained_target_grounded(&kept_rec, &extractor);
                let (again, second) =
                    filter_sentences(&kept_rec, &extractor, &stops, policy).unwrap();
                assert_eq!(
                    again.expect("second pass keeps everything").target,
                    kept_rec.target,
                    "record r{i}: sentence filtering must be idempotent"
                );
                assert!(second.dropped_sentences.is_empty());
            }
            None => {
                dropped_records += 1;
                assert_eq!(outcome.reason, Some(DropReason::EmptyAfterFilter));
            }
        }
    }
    assert!(
        kept_records > 0 && dropped_records > 0,
        "generator must exercise both outcomes"
    );
    println!(
        "[PASS] criterion 3: sentence filter kept grounded subsequences on 200 random records \
         ({kept_records} kept, {dropped_records} dropped) plus 4 fixtures"
    );
}

// ---------------------------------------------------------------------------
// Criterion 4: entity-chain round-trip
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_entity_chain_round_trip() {
    let stops = StopwordSet::default_english();
    let extractor = HeuristicExtractor::new(stops.clone());
    let mut rng = StdRng::seed_from_u64(0xFAC7_5004);

    let mut zero_chain = 0usize;
    for i in 0..200 {
        // Every tenth target is all stopwords: the degenerate zero-entity
        // chain must round-trip too.
        let target = if i % 10 == 0 {
            "It was of the and in.".to_string()
        } else {
            (0..rng.gen_range(1..=3))
                .map(|_| format!("{}.", words(&mut rng, 1, 6).join(" ")))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let rec = record(&format!("j{i}"), "irrelevant source.", &target, None);

        let augmented = jaens_augment(&rec, &extractor, DEFAULT_SEPARATOR)
            .expect("vocabulary cannot collide with the separator");
        if augmented.entity_chain.is_empty() {
            zero_chain += 1;
        }
        let serialized = augmented.serialize();
        let split = jaens_split(&serialized, DEFAULT_SEPARATOR);
        assert!(
            split.separator_found,
            "record j{i}: separator must be found"
        );
        assert_eq!(
            split.entity_chain, augmented.entity_chain,
            "record j{i}: chain must round-trip"
        );
        assert_eq!(
            split.summary, augmented.summary,
            "record j{i}: summary must round-trip"
        );
        assert_eq!(
            split.summary,
            rec.target.trim(),
            "record j{i}: summary must be the trimmed original target"
        );
    }
    assert!(
        zero_chain >= 20,
        "degenerate zero-entity case must be exercised"
    );

    // Without a separator the whole text is the summary.
    let split = jaens_split("plain text with no marker", DEFAULT_SEPARATOR);
    assert!(!split.separator_found);
    assert!(split.entity_chain.is_empty());
    assert_eq!(split.summary, "plain text with no marker");

    println!(
        "[PASS] criterion 4: augment/split round-trips chain and summary on 200 records \
         ({zero_chain} with empty chains)"
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: case-study fixture
// ---------------------------------------------------------------------------

#[derive(serde::Deserialize)]
struct CaseStudy {
    article_entities: Vec<String>,
    abstract_entities: Vec<String>,
    systems: Vec<CaseStudySystem>,
    published_article_count: usize,
    published_abstract_count: usize,
    tolerance: i64,
}

#[derive(serde::Deserialize)]
struct CaseStudySystem {
    name: String,
    entities: Vec<String>,
    published_count: usize,
    published_matched_article: i64,
    published_matched_abstract: i64,
}

#[test]
fn criterion_5_case_study_fixture() {
    let raw = fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/pubmed_case_study.json"
    ))
    .expect("fixture present");
    let case: CaseStudy = serde_json::from_str(&raw).expect("fixture parses");

    let stops = StopwordSet::default_english();
    let policy = MatchPolicy::default();

    // Mention counts of the ingested annotation lists must be exact.
    let article_inv = ingest_annotations(&case.article_entities);
    let abstract_inv = ingest_annotations(&case.abstract_entities);
    assert_eq!(
        article_inv.count(CountMode::NonUnique),
        case.published_article_count
    );
    assert_eq!(
        abstract_inv.count(CountMode::NonUnique),
        case.published_abstract_count
    );

    // The fixture carries entity lists, not running text, so matching runs
    // against pseudo-texts: each list joined into one document. This keeps
    // every published figure checkable from the shipped data alone; the
    // match-rule ambiguity that remains is why the tolerance exists.
    let pseudo_article = tokenize(&case.article_entities.join(" "));
    let pseudo_abstract = tokenize(&case.abstract_entities.join(" "));
    let article_matcher = TextMatcher::new(&pseudo_article, &stops, policy);
    let abstract_matcher = TextMatcher::new(&pseudo_abstract, &stops, policy);

    let mut summary_lines = Vec::new();
    for system in &case.systems {
        let inv = ingest_annotations(&system.entities);
        assert_eq!(
            inv.count(CountMode::NonUnique),
            system.published_count,
            "{}: mention count must be exact",
            system.name
        );

        let matched_article =
            count_matched_in_text(&inv, &article_matcher, CountMode::NonUnique) as i64;
        let matched_abstract =
            count_matched_in_text(&inv, &abstract_matcher, CountMode::NonUnique) as i64;
        assert!(
            (matched_article - system.published_matched_article).abs() <= case.tolerance,
            "{}: article-side matches {} not within ±{} of {}",
            system.name,
            matched_article,
            case.tolerance,
            system.published_matched_article
        );
        assert!(
            (matched_abstract - system.published_matched_abstract).abs() <= case.tolerance,
            "{}: abstract-side matches {} not within ±{} of {}",
            system.name,
            matched_abstract,
            case.tolerance,
            system.published_matched_abstract
        );
        summary_lines.push(format!(
            "{} count={} article {}/{} abstract {}/{}",
            system.name,
            system.published_count,
            matched_article,
            system.published_matched_article,
            matched_abstract,
            system.published_matched_abstract
        ));
    }
    println!(
        "[PASS] criterion 5: case-study counts exact (271/61/{}), matched counts within ±{}: {}",
        case.systems
            .iter()
            .map(|s| s.published_count.to_string())
            .collect::<Vec<_>>()
            .join("/"),
        case.tolerance,
        summary_lines.join("; ")
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: overlap-metric sanity
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_rouge_sanity() {
    const EPS: f64 = 1e-9;
    let toks = |s: &str| tokenize(s).tokens;

    // Identical texts: every variant is exactly 1.
    let same = toks("the cat sat on the mat");
    assert!((rouge_n(&same, &same, 1).unwrap().f1 - 1.0).abs() < EPS);
    assert!((rouge_n(&same, &same, 2).unwrap().f1 - 1.0).abs() < EPS);
    assert!((rouge_l(&same, &same).f1 - 1.0).abs() < EPS);
    assert!((rouge_lsum(&[&same], &[&same]).f1 - 1.0).abs() < EPS);

    // Vocabulary-disjoint texts: every variant is exactly 0.
    let left = toks("alpha beta gamma");
    let right = toks("delta zeta cohort");
    assert_eq!(rouge_n(&left, &right, 1).unwrap().f1, 0.0);
    assert_eq!(rouge_n(&left, &right, 2).unwrap().f1, 0.0);
    assert_eq!(rouge_l(&left, &right).f1, 0.0);
    assert_eq!(rouge_lsum(&[&left], &[&right]).f1, 0.0);

    // Hand-computed unigram example: P=1, R=2/3, F1=0.8.
    let partial = rouge_n(&toks("the cat"), &toks("the cat sat"), 1).unwrap();
    assert!((partial.precision - 1.0).abs() < EPS);
    assert!((partial.recall - 2.0 / 3.0).abs() < EPS);
    assert!((partial.f1 - 0.8).abs() < EPS);

    // Hand-computed LCS example: LCS("a x b", "a y b") = "a b", F1 = 2/3.
    let lcs = rouge_l(&toks("a x b"), &toks("a y b"));
    assert!((lcs.f1 - 2.0 / 3.0).abs() < EPS);

    println!("[PASS] criterion 6: overlap metrics match hand computations (R1 F1 0.8, LCS F1 2/3)");
}

// ---------------------------------------------------------------------------
// Criterion 7: binary determinism across --jobs
// ---------------------------------------------------------------------------

fn write_determinism_corpus(path: &Path) {
    let mut rng = StdRng::seed_from_u64(0xFAC7_5007);
    let mut lines = Vec::with_capacity(100);
    for i in 0..100 {
        let sentence = |rng: &mut StdRng, max: usize| format!("{}.", words(rng, 2, max).join(" "));
        let source = format!("{} {}", sentence(&mut rng, 12), sentence(&mut rng, 12));
        let target = sentence(&mut rng, 8);
        let hypothesis = sentence(&mut rng, 8);
        let rec = record(&format!("r{i:03}"), &source, &target, Some(&hypothesis));
        lines.push(serde_json::to_string(&rec).expect("record serializes"));
    }
    fs::write(path, lines.join("\n") + "\n").expect("corpus written");
}

fn run_factsum(dir: &Path, args: &[&str]) {
    let output = Command::new(env!("CARGO_BIN_EXE_factsum"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary launches");
    assert!(
        output.status.success(),
        "factsum {:?} failed: {}",
        args,
        String::from_utf8_lossy(&output.stderr)
    );
}

fn assert_same_bytes(a: &Path, b: &Path, what: &str) {
    let left = fs::read(a).expect("first artifact readable");
    let right = fs::read(b).expect("second artifact readable");
    assert!(!left.is_empty(), "{what}: artifact must not be empty");
    assert_eq!(
        left, right,
        "{what}: artifacts differ across --jobs settings"
    );
}

#[test]
fn criterion_7_determinism_across_jobs() {
    let tmp = tempfile::tempdir().expect("tempdir");
    // Identical relative paths in two sibling directories, so the artifacts'
    // embedded configuration echoes are comparable byte for byte.
    let d1 = tmp.path().join("jobs1");
    let d8 = tmp.path().join("jobs8");
    for dir in [&d1, &d8] {
        fs::create_dir(dir).expect("run dir");
        write_determinism_corpus(&dir.join("corpus.jsonl"));
    }
    assert_same_bytes(
        &d1.join("corpus.jsonl"),
        &d8.join("corpus.jsonl"),
        "input corpus",
    );

    for (dir, jobs) in [(&d1, "1"), (&d8, "8")] {
        let common = ["--input", "corpus.jsonl", "--jobs", jobs];
        run_factsum(
            dir,
            &[
                &["score"],
                &common[..],
                &["--output", "score.json", "--report", "json"],
            ]
            .concat(),
        );
        run_factsum(
            dir,
            &[
                &["filter"],
                &common[..],
                &["--strategy", "sentence", "--output", "filtered.jsonl"],
            ]
            .concat(),
        );
        run_factsum(
            dir,
            &[&["augment"], &common[..], &["--output", "augmented.jsonl"]].concat(),
        );
    }

    for artifact in [
        "score.json",
        "filtered.jsonl",
        "filtered.audit.jsonl",
        "augmented.jsonl",
    ] {
        assert_same_bytes(&d1.join(artifact), &d8.join(artifact), artifact);
    }
    println!(
        "[PASS] criterion 7: score/filter/augment artifacts byte-identical for --jobs 1 vs 8 \
         on a 100-record corpus"
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: invariant suite
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_invariant_suite() {
    let stops = StopwordSet::default_english();
    sanity_check_vocab(&stops);
    let mut rng = StdRng::seed_from_u64(0xFAC7_5008);

    // (a) Monotonicity under document extension: prepending and appending
    // text never un-matches an entity, and never lowers matched counts.
    let mut matched_cases = 0usize;
    for _ in 0..250 {
        let doc_words = words(&mut rng, 0, 20);
        let policy = random_policy(&mut rng);
        let doc = tokenize(&doc_words.join(" "));
        let prefix = words(&mut rng, 0, 5);
        let suffix = words(&mut rng, 0, 5);
        let extended_words: Vec<String> = prefix
            .iter()
            .chain(doc_words.iter())
            .chain(suffix.iter())
            .cloned()
            .collect();
        let extended = tokenize(&extended_words.join(" "));
        let matcher = TextMatcher::new(&doc, &stops, policy);
        let extended_matcher = TextMatcher::new(&extended, &stops, policy);

        let strings: Vec<String> = (0..rng.gen_range(1..=6))
            .map(|_| random_entity(&mut rng, &[&doc_words]).join(" "))
            .collect();
        let inventory = ingest_annotations(&strings);
        for mention in inventory.mentions() {
            if matcher.matches_tokens(&mention.tokens) {
                matched_cases += 1;
                assert!(
                    extended_matcher.matches_tokens(&mention.tokens),
                    "extending the document must not un-match {:?}",
                    mention.key
                );
            }
        }
        for mode in [CountMode::Unique, CountMode::NonUnique] {
            assert!(
                count_matched_in_text(&inventory, &extended_matcher, mode)
                    >= count_matched_in_text(&inventory, &matcher, mode),
                "matched counts must not decrease under document extension"
            );
        }
    }
    assert!(
        matched_cases >= 200,
        "generator must produce enough matching cases"
    );

    // (b) Unique counts never exceed non-unique counts.
    for _ in 0..250 {
        let strings: Vec<String> = (0..rng.gen_range(0..=10))
            .map(|_| words(&mut rng, 1, 3).join(" "))
            .collect();
        let inventory = ingest_annotations(&strings);
        assert!(inventory.count(CountMode::Unique) <= inventory.count(CountMode::NonUnique));

        let doc = tokenize(&words(&mut rng, 0, 20).join(" "));
        let matcher = TextMatcher::new(&doc, &stops, random_policy(&mut rng));
        assert!(
            count_matched_in_text(&inventory, &matcher, CountMode::Unique)
                <= count_matched_in_text(&inventory, &matcher, CountMode::NonUnique),
            "matched unique count must not exceed matched mention count"
        );
    }

    // (c) F1 lies between its components.
    for _ in 0..250 {
        let p: f64 = rng.gen();
        let r: f64 = rng.gen();
        let f = f1_target(p, r);
        assert!(
            p.min(r) - 1e-12 <= f && f <= p.max(r) + 1e-12,
            "F1({p}, {r}) = {f} out of bounds"
        );
    }
    assert_eq!(f1_target(0.0, 0.0), 0.0);

    // (d) Aggregation is invariant under record permutation.
    let policy = MatchPolicy::default();
    for round in 0..200 {
        let n = rng.gen_range(1..=12);
        let mut records: Vec<RecordScores> = (0..n)
            .map(|k| {
                let source = tokenize(&words(&mut rng, 1, 15).join(" "));
                let hyp = tokenize(&words(&mut rng, 1, 8).join(" "));
                let hyp_strings: Vec<String> = (0..rng.gen_range(0..=4))
                    .map(|_| words(&mut rng, 1, 2).join(" "))
                    .collect();
                let hyp_inv = ingest_annotations(&hyp_strings);
                score_record(
                    &ScoreInputs {
                        id: &format!("g{round}-{k}"),
                        source: &source,
                        hypothesis: &hyp,
                        hyp_entities: &hyp_inv,
                        target: None,
                    },
                    &stops,
                    policy,
                )
            })
            .collect();
        let baseline = aggregate(records.clone(), policy).expect("non-empty");
        records.shuffle(&mut rng);
        let shuffled = aggregate(records, policy).expect("non-empty");
        assert_eq!(
            serde_json::to_string(&baseline.aggregate).unwrap(),
            serde_json::to_string(&shuffled.aggregate).unwrap(),
            "round {round}: aggregate must be permutation-invariant"
        );
    }

    println!(
        "[PASS] criterion 8: invariants hold (extension monotonicity {matched_cases} cases, \
         U<=NU 250, F1 bounds 250, permutation invariance 200)"
    );
}
