//! Entity mentions, inventories, and the two ways of producing them:
//! heuristic extraction from text and ingestion of external annotations.
//!
//! The heuristic extractor is deliberately simple and deterministic: within
//! each sentence, every maximal run of consecutive non-stop-word tokens is
//! one mention. That trades named-entity precision for zero model
//! dependencies and exact reproducibility, which is what corpus-level
//! filtering and scoring need. When gold annotations exist they can be
//! ingested instead and flow through the identical matching pipeline.

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::textproc::{tokenize, StopwordSet, TokenizedText};

/// Which inventory view a count refers to: distinct surface forms (`Unique`)
/// or every mention (`NonUnique`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    #[serde(rename = "u")]
    Unique,
    #[serde(rename = "nu")]
    NonUnique,
}

/// Token offsets of an extracted mention within its source document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MentionSpan {
    /// Index into the document's sentence bounds.
    pub sentence: usize,
    /// Half-open token range in the document token stream.
    pub start: usize,
    pub end: usize,
}

/// One entity occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityMention {
    /// The text this mention was built from, as supplied.
    pub surface: String,
    /// Normalized tokens; never empty.
    pub tokens: Vec<String>,
    /// Canonical identity: `tokens` joined by single spaces. Two mentions
    /// with equal keys are the same entity in `Unique` counting.
    pub key: String,
    /// Where the mention sits when it came from extraction; `None` for
    /// ingested annotations, which have no position in any document.
    pub span: Option<MentionSpan>,
}

impl EntityMention {
    /// Builds a mention from normalized tokens. Returns `None` when the
    /// token list is empty (such input carries no entity).
    pub fn new(surface: String, tokens: Vec<String>, span: Option<MentionSpan>) -> Option<Self> {
        if tokens.is_empty() {
            return None;
        }
        let key = tokens.join(" ");
        Some(Self {
            surface,
            tokens,
            key,
            span,
        })
    }
}

/// A document's entities in both counting views: the ordered mention list
/// (Non-Unique) and the insertion-ordered set of distinct keys (Unique).
///
/// The key set is derived from the mentions at construction time and always
/// equals the set of their keys, so `count(Unique) <= count(NonUnique)`.
#[derive(Debug, Clone, Default)]
pub struct EntityInventory {
    mentions: Vec<EntityMention>,
    keys: IndexSet<String>,
}

impl EntityInventory {
    /// Builds an inventory; key set is derived in first-occurrence order.
    pub fn from_mentions(mentions: Vec<EntityMention>) -> Self {
        let keys = mentions.iter().map(|m| m.key.clone()).collect();
        Self { mentions, keys }
    }

    /// All mentions in their original order.
    pub fn mentions(&self) -> &[EntityMention] {
        &self.mentions
    }

    /// Distinct canonical keys in first-occurrence order.
    pub fn keys(&self) -> &IndexSet<String> {
        &self.keys
    }

    /// Entity count under the given mode.
    pub fn count(&self, mode: CountMode) -> usize {
        match mode {
            CountMode::Unique => self.keys.len(),
            CountMode::NonUnique => self.mentions.len(),
        }
    }

    /// True when the inventory holds no mentions.
    pub fn is_empty(&self) -> bool {
        self.mentions.is_empty()
    }
}

/// Entity count of an inventory under the given mode.
pub fn inventory_count(inventory: &EntityInventory, mode: CountMode) -> usize {
    inventory.count(mode)
}

/// Extracts mentions as maximal runs of consecutive non-stop-word tokens
/// within each sentence, in document order. Runs never cross sentence
/// boundaries; a sentence of only stop words yields nothing.
pub fn extract_heuristic(text: &TokenizedText, stopwords: &StopwordSet) -> EntityInventory {
    let mut mentions = Vec::new();
    for (sentence, &(start, end)) in text.sentence_bounds.iter().enumerate() {
        let mut run_start = None;
        for i in start..=end {
            let at_break = i == end || stopwords.contains(&text.tokens[i]);
            match (run_start, at_break) {
                (None, false) => run_start = Some(i),
                (Some(from), true) => {
                    let tokens = text.tokens[from..i].to_vec();
                    let span = MentionSpan {
                        sentence,
                        start: from,
                        end: i,
                    };
                    mentions.extend(EntityMention::new(tokens.join(" "), tokens, Some(span)));
                    run_start = None;
                }
                _ => {}
            }
        }
    }
    EntityInventory::from_mentions(mentions)
}

/// Ingests externally annotated entity strings. Each string is normalized
/// and tokenized; strings that normalize to nothing are dropped. Order and
/// duplicates are preserved (duplicates collapse only in the key set).
pub fn ingest_annotations<S: AsRef<str>>(entity_strings: &[S]) -> EntityInventory {
    let mentions = entity_strings
        .iter()
        .filter_map(|raw| {
            let tokens = tokenize(raw.as_ref()).tokens;
            EntityMention::new(raw.as_ref().to_string(), tokens, None)
        })
        .collect();
    EntityInventory::from_mentions(mentions)
}

/// Produces the entity inventory of a tokenized text. The two
/// implementations are the heuristic extractor and the annotation locator;
/// every transform that needs per-text entities goes through this seam so
/// annotated and unannotated corpora share one code path.
pub trait EntityExtractor {
    fn extract(&self, text: &TokenizedText) -> EntityInventory;
}

/// [`EntityExtractor`] backed by [`extract_heuristic`].
#[derive(Debug, Clone)]
pub struct HeuristicExtractor {
    stopwords: StopwordSet,
}

impl HeuristicExtractor {
    pub fn new(stopwords: StopwordSet) -> Self {
        Self { stopwords }
    }
}

impl EntityExtractor for HeuristicExtractor {
    fn extract(&self, text: &TokenizedText) -> EntityInventory {
        extract_heuristic(text, &self.stopwords)
    }
}

/// [`EntityExtractor`] that locates a fixed list of annotation strings in
/// whatever text it is given: an annotation contributes one mention at its
/// first contiguous in-sentence occurrence, and is skipped when absent.
/// Mentions are emitted in annotation order.
///
/// This is how annotated corpora participate in per-sentence operations
/// (like sentence filtering), where each target sentence needs its own
/// inventory but annotations exist only per record.
#[derive(Debug, Clone)]
pub struct AnnotationLocator {
    annotations: Vec<(String, Vec<String>)>,
}

impl AnnotationLocator {
    /// Normalizes the annotation strings once. Strings that normalize to
    /// nothing are dropped.
    pub fn new<S: AsRef<str>>(entity_strings: &[S]) -> Self {
        let annotations = entity_strings
            .iter()
            .filter_map(|raw| {
                let tokens = tokenize(raw.as_ref()).tokens;
                (!tokens.is_empty()).then(|| (raw.as_ref().to_string(), tokens))
            })
            .collect();
        Self { annotations }
    }
}

impl EntityExtractor for AnnotationLocator {
    fn extract(&self, text: &TokenizedText) -> EntityInventory {
        let mut mentions = Vec::new();
        for (surface, tokens) in &self.annotations {
            let found =
                text.sentence_bounds
                    .iter()
                    .enumerate()
                    .find_map(|(sentence, &(start, end))| {
                        let window = &text.tokens[start..end];
                        window
                            .windows(tokens.len())
                            .position(|w| w == tokens.as_slice())
                            .map(|offset| MentionSpan {
                                sentence,
                                start: start + offset,
                                end: start + offset + tokens.len(),
                            })
                    });
            if let Some(span) = found {
                mentions.extend(EntityMention::new(
                    surface.clone(),
                    tokens.clone(),
                    Some(span),
                ));
            }
        }
        EntityInventory::from_mentions(mentions)
    }
}
