//! Partial n-gram matching of entities against documents and entity sets.
//!
//! An entity *matches a document* when any contiguous sub-sequence of its
//! tokens occurs as a contiguous token run in the document. Components are
//! tried longest-first, so a full-phrase hit short-circuits; single-token
//! components are gated so that stop words (always, by default) and purely
//! numeric tokens (opt-in) cannot carry a match on their own — "the" being
//! in both texts says nothing about factual consistency.
//!
//! Matching one entity set against another is direction-sensitive and comes
//! in two flavors: exact canonical-key intersection (the default for
//! hypothesis-vs-target) and the same partial rule applied to the other
//! side's text.

use std::collections::HashSet;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::entities::{CountMode, EntityInventory, EntityMention};
use crate::textproc::{StopwordSet, TokenizedText};
use crate::{Error, Result};

/// How hypothesis entities are matched against the target side (and vice
/// versa) when both are entity sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetMatchMode {
    /// Canonical keys must be equal.
    ExactKey,
    /// The partial n-gram rule, applied to the other side's token stream.
    PartialText,
}

/// Tunable matching behavior. The default is the configuration every
/// shipped metric uses: stop-word unigrams blocked, numeric unigrams
/// allowed, exact-key target intersection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub struct MatchPolicy {
    /// Block single stop-word tokens from matching on their own.
    pub unigram_stopword_block: bool,
    /// Block purely numeric single tokens from matching on their own.
    pub numeric_unigram_block: bool,
    /// How entity-set-vs-entity-set intersection works.
    pub target_match_mode: TargetMatchMode,
}

impl Default for MatchPolicy {
    fn default() -> Self {
        Self {
            unigram_stopword_block: true,
            numeric_unigram_block: false,
            target_match_mode: TargetMatchMode::ExactKey,
        }
    }
}

fn is_numeric(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| c.is_ascii_digit())
}

/// A document prepared for repeated entity matching: holds a unigram set so
/// single-token probes are O(1) and longer probes can reject cheaply.
pub struct TextMatcher<'a> {
    doc: &'a TokenizedText,
    stopwords: &'a StopwordSet,
    policy: MatchPolicy,
    unigrams: HashSet<&'a str>,
}

impl<'a> TextMatcher<'a> {
    pub fn new(doc: &'a TokenizedText, stopwords: &'a StopwordSet, policy: MatchPolicy) -> Self {
        let unigrams = doc.tokens.iter().map(String::as_str).collect();
        Self {
            doc,
            stopwords,
            policy,
            unigrams,
        }
    }

    /// The policy this matcher was built with.
    pub fn policy(&self) -> MatchPolicy {
        self.policy
    }

    /// Partial-match test for a normalized token sequence. Components are
    /// tried longest-first with short-circuit; an empty slice matches
    /// nothing. This is the single implementation every public matching and
    /// counting function routes through.
    pub fn matches_tokens<T: AsRef<str>>(&self, entity_tokens: &[T]) -> bool {
        for n in (1..=entity_tokens.len()).rev() {
            for component in entity_tokens.windows(n) {
                if n == 1 {
                    let token = component[0].as_ref();
                    if self.policy.unigram_stopword_block && self.stopwords.contains(token) {
                        continue;
                    }
                    if self.policy.numeric_unigram_block && is_numeric(token) {
                        continue;
                    }
                    if self.unigrams.contains(token) {
                        return true;
                    }
                } else {
                    if !component.iter().all(|t| self.unigrams.contains(t.as_ref())) {
                        continue;
                    }
                    let hit = self.doc.tokens.windows(n).any(|w| {
                        w.iter()
                            .map(String::as_str)
                            .eq(component.iter().map(AsRef::as_ref))
                    });
                    if hit {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Partial-match test for a mention.
    ///
    /// # Errors
    /// A mention with no tokens is an invalid argument (it cannot exist via
    /// this crate's constructors, but the contract is explicit for
    /// hand-built values).
    pub fn matches(&self, entity: &EntityMention) -> Result<bool> {
        if entity.tokens.is_empty() {
            return Err(Error::InvalidArgument(
                "entity mention has no tokens".into(),
            ));
        }
        Ok(self.matches_tokens(&entity.tokens))
    }
}

/// Whether `entity` partially matches `doc`. One-shot convenience over
/// [`TextMatcher`]; build the matcher directly when probing many entities
/// against the same document.
pub fn entity_matches_text(
    entity: &EntityMention,
    doc: &TokenizedText,
    stopwords: &StopwordSet,
    policy: MatchPolicy,
) -> Result<bool> {
    TextMatcher::new(doc, stopwords, policy).matches(entity)
}

/// Counts the entities of `inventory` that partially match the matcher's
/// document: mentions in `NonUnique` mode, distinct keys in `Unique` mode.
pub fn count_matched_in_text(
    inventory: &EntityInventory,
    matcher: &TextMatcher<'_>,
    mode: CountMode,
) -> usize {
    match mode {
        CountMode::NonUnique => inventory
            .mentions()
            .iter()
            .filter(|m| matcher.matches_tokens(&m.tokens))
            .count(),
        CountMode::Unique => inventory
            .keys()
            .iter()
            .filter(|key| matcher.matches_tokens(&key.split(' ').collect::<Vec<_>>()))
            .count(),
    }
}

/// Counts the entities of `inventory` whose canonical key is in `keys`.
pub fn count_matched_in_keys(
    inventory: &EntityInventory,
    keys: &IndexSet<String>,
    mode: CountMode,
) -> usize {
    match mode {
        CountMode::NonUnique => inventory
            .mentions()
            .iter()
            .filter(|m| keys.contains(&m.key))
            .count(),
        CountMode::Unique => inventory
            .keys()
            .iter()
            .filter(|key| keys.contains(key.as_str()))
            .count(),
    }
}

/// Counts the entities of `inventory` found on the other side of a pair,
/// honoring `policy.target_match_mode`: exact key intersection against
/// `other`'s keys, or partial matching against `other_text`.
pub fn count_matched_in_target(
    inventory: &EntityInventory,
    other: &EntityInventory,
    other_text: &TokenizedText,
    mode: CountMode,
    stopwords: &StopwordSet,
    policy: MatchPolicy,
) -> usize {
    match policy.target_match_mode {
        TargetMatchMode::ExactKey => count_matched_in_keys(inventory, other.keys(), mode),
        TargetMatchMode::PartialText => {
            let matcher = TextMatcher::new(other_text, stopwords, policy);
            count_matched_in_text(inventory, &matcher, mode)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entities::ingest_annotations;
    use crate::textproc::tokenize;

    fn stops() -> StopwordSet {
        StopwordSet::default_english()
    }

    fn mention(s: &str) -> EntityMention {
        let tokens = tokenize(s).tokens;
        EntityMention::new(s.to_string(), tokens, None).expect("non-empty")
    }

    #[test]
    fn full_phrase_match() {
        let doc = tokenize("basal cell carcinoma was found");
        let stop = stops();
        assert!(entity_matches_text(
            &mention("basal cell carcinoma"),
            &doc,
            &stop,
            MatchPolicy::default()
        )
        .unwrap());
    }

    #[test]
    fn partial_component_match() {
        // Only a sub-phrase of the entity occurs in the document.
        let doc = tokenize("the basal cell looked normal");
        let stop = stops();
        assert!(entity_matches_text(
            &mention("basal cell carcinoma"),
            &doc,
            &stop,
            MatchPolicy::default()
        )
        .unwrap());
    }

    #[test]
    fn component_must_be_contiguous_in_doc() {
        let doc = tokenize("basal tissue cell carcinoma-free");
        let stop = StopwordSet::from_lines(["the"]);
        // "basal cell" is not contiguous; unigrams "basal"/"cell" are not
        // stop words, so they still carry the match...
        assert!(
            entity_matches_text(&mention("basal cell"), &doc, &stop, MatchPolicy::default())
                .unwrap()
        );
        // ...but a two-stop-word entity with no contiguous bigram fails.
        let doc2 = tokenize("the other of");
        let stop2 = StopwordSet::from_lines(["the", "of"]);
        assert!(
            !entity_matches_text(&mention("the of"), &doc2, &stop2, MatchPolicy::default())
                .unwrap()
        );
        // The same entity as a contiguous bigram matches: longer components
        // are exempt from the unigram gate.
        let doc3 = tokenize("the of");
        assert!(
            entity_matches_text(&mention("the of"), &doc3, &stop2, MatchPolicy::default()).unwrap()
        );
    }

    #[test]
    fn stopword_unigram_is_blocked_by_default() {
        let doc = tokenize("the patient arrived");
        let stop = stops();
        assert!(
            !entity_matches_text(&mention("the"), &doc, &stop, MatchPolicy::default()).unwrap()
        );
        let open = MatchPolicy {
            unigram_stopword_block: false,
            ..MatchPolicy::default()
        };
        assert!(entity_matches_text(&mention("the"), &doc, &stop, open).unwrap());
    }

    #[test]
    fn numeric_unigram_block_is_opt_in() {
        let doc = tokenize("cohort of 120 patients");
        let stop = stops();
        assert!(entity_matches_text(&mention("120"), &doc, &stop, MatchPolicy::default()).unwrap());
        let blocked = MatchPolicy {
            numeric_unigram_block: true,
            ..MatchPolicy::default()
        };
        assert!(!entity_matches_text(&mention("120"), &doc, &stop, blocked).unwrap());
    }

    #[test]
    fn content_unigram_matches() {
        let doc = tokenize("screening saves lives");
        let stop = stops();
        assert!(
            entity_matches_text(&mention("screening"), &doc, &stop, MatchPolicy::default())
                .unwrap()
        );
        assert!(
            !entity_matches_text(&mention("melanoma"), &doc, &stop, MatchPolicy::default())
                .unwrap()
        );
    }

    #[test]
    fn empty_mention_is_an_error() {
        let doc = tokenize("anything");
        let stop = stops();
        let broken = EntityMention {
            surface: String::new(),
            tokens: vec![],
            key: String::new(),
            span: None,
        };
        assert!(matches!(
            entity_matches_text(&broken, &doc, &stop, MatchPolicy::default()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn count_in_text_respects_mode() {
        let stop = stops();
        let doc = tokenize("alpha was observed");
        let matcher = TextMatcher::new(&doc, &stop, MatchPolicy::default());
        let inv = ingest_annotations(&["alpha", "alpha", "beta"]);
        assert_eq!(
            count_matched_in_text(&inv, &matcher, CountMode::NonUnique),
            2
        );
        assert_eq!(count_matched_in_text(&inv, &matcher, CountMode::Unique), 1);
        assert_eq!(
            count_matched_in_text(&EntityInventory::default(), &matcher, CountMode::NonUnique),
            0
        );
    }

    #[test]
    fn count_in_keys_is_exact_intersection() {
        let x = ingest_annotations(&["a b", "c"]);
        let y = ingest_annotations(&["b", "c", "d"]);
        // "a b" != "b": partial overlap does not count under exact keys.
        assert_eq!(count_matched_in_keys(&x, y.keys(), CountMode::Unique), 1);
        let rep = ingest_annotations(&["a", "a", "b"]);
        let only_a = ingest_annotations(&["a"]);
        assert_eq!(
            count_matched_in_keys(&rep, only_a.keys(), CountMode::NonUnique),
            2
        );
        assert_eq!(
            count_matched_in_keys(&rep, only_a.keys(), CountMode::Unique),
            1
        );
    }

    #[test]
    fn target_mode_switches_between_key_and_text_matching() {
        let stop = stops();
        let hyp = ingest_annotations(&["basal cell"]);
        let tgt = ingest_annotations(&["basal cell carcinoma"]);
        let tgt_text = tokenize("basal cell carcinoma");
        let exact = MatchPolicy::default();
        assert_eq!(
            count_matched_in_target(&hyp, &tgt, &tgt_text, CountMode::Unique, &stop, exact),
            0
        );
        let partial = MatchPolicy {
            target_match_mode: TargetMatchMode::PartialText,
            ..MatchPolicy::default()
        };
        assert_eq!(
            count_matched_in_target(&hyp, &tgt, &tgt_text, CountMode::Unique, &stop, partial),
            1
        );
    }
}
