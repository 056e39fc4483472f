//! Normalization, tokenization, sentence splitting, n-grams, and stop words.
//!
//! Everything downstream (extraction, matching, metrics, filtering) consumes
//! the representations produced here, so the rules are deliberately small and
//! frozen:
//!
//! * a token is lowercased with punctuation stripped, keeping alphanumerics
//!   and internal hyphens (`"non-melanoma"` survives, `"Cancer,"` becomes
//!   `"cancer"`, numerals are kept);
//! * sentences split on `.`/`!`/`?` followed by whitespace or end of text,
//!   with a short abbreviation guard (`"fig."`, `"et al."`, …) so common
//!   scientific prose does not over-split;
//! * n-grams are contiguous token windows.

use std::collections::HashSet;
use std::path::Path;

use crate::{Error, Result};

/// Built-in English stop-word inventory (one token per line, `#` comments).
/// Entries are stored pre-normalized; see `data/stopwords_en.txt`.
const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

/// Words that suppress a sentence split after a period. Compared against the
/// lowercased word preceding the period with its own periods removed, so
/// `"e.g."` is looked up as `"eg"`.
const ABBREVIATIONS: &[&str] = &[
    "al", "ca", "cf", "dr", "eg", "eq", "eqs", "et", "fig", "figs", "ie", "mr", "mrs", "ms",
    "prof", "resp", "sec", "secs", "st", "vs",
];

/// A document as a normalized token stream plus sentence boundaries.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenizedText {
    /// Normalized tokens in document order. Never contains empty strings.
    pub tokens: Vec<String>,
    /// Half-open `(start, end)` token ranges, one per sentence that produced
    /// at least one token. Ranges are contiguous, non-overlapping, and cover
    /// `tokens` exactly.
    pub sentence_bounds: Vec<(usize, usize)>,
    /// Character count of the original text.
    pub raw_len: usize,
}

impl TokenizedText {
    /// True when the text produced no tokens.
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens of one sentence by index.
    ///
    /// # Panics
    /// Panics if `idx` is out of range.
    pub fn sentence_tokens(&self, idx: usize) -> &[String] {
        let (start, end) = self.sentence_bounds[idx];
        &self.tokens[start..end]
    }

    /// Per-sentence token slices in document order.
    pub fn sentences(&self) -> impl Iterator<Item = &[String]> + '_ {
        self.sentence_bounds
            .iter()
            .map(move |&(start, end)| &self.tokens[start..end])
    }
}

/// Normalizes a single whitespace-delimited piece: lowercase, keep
/// alphanumerics and hyphens, strip everything else, then trim hyphens from
/// both ends. May return an empty string (e.g. for `"--"` or `"…"`).
pub fn normalize_token(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for ch in raw.chars() {
        if ch.is_alphanumeric() {
            out.extend(ch.to_lowercase());
        } else if ch == '-' {
            out.push('-');
        }
    }
    if out.starts_with('-') || out.ends_with('-') {
        out.trim_matches('-').to_string()
    } else {
        out
    }
}

/// True when the segment before a period ends in a guarded abbreviation.
fn ends_in_abbreviation(prefix: &str) -> bool {
    let last_word = prefix
        .rsplit(char::is_whitespace)
        .next()
        .unwrap_or_default();
    // Drop surrounding punctuation and internal periods ("(e.g" -> "eg").
    let cleaned: String = last_word
        .chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect();
    !cleaned.is_empty() && ABBREVIATIONS.contains(&cleaned.as_str())
}

/// Splits raw text into sentences on `.`/`!`/`?` followed by whitespace or
/// end of text. A period preceded by a known abbreviation does not split.
/// Returned sentences are trimmed and non-empty; no non-whitespace character
/// of the input is lost.
pub fn split_sentences(raw: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut chars = raw.char_indices().peekable();
    while let Some((i, ch)) = chars.next() {
        if ch != '.' && ch != '!' && ch != '?' {
            continue;
        }
        let at_boundary = match chars.peek() {
            None => true,
            Some(&(_, next)) => next.is_whitespace(),
        };
        if !at_boundary {
            continue;
        }
        if ch == '.' && ends_in_abbreviation(&raw[start..i]) {
            continue;
        }
        let sentence = raw[start..i + ch.len_utf8()].trim();
        if !sentence.is_empty() {
            sentences.push(sentence.to_string());
        }
        start = i + ch.len_utf8();
    }
    let tail = raw[start..].trim();
    if !tail.is_empty() {
        sentences.push(tail.to_string());
    }
    sentences
}

/// Tokenizes raw text: sentence split, whitespace split, per-piece
/// normalization, empty pieces dropped. Sentences whose every piece
/// normalizes to empty contribute no bounds entry.
pub fn tokenize(raw: &str) -> TokenizedText {
    let mut tokens = Vec::new();
    let mut sentence_bounds = Vec::new();
    for sentence in split_sentences(raw) {
        let start = tokens.len();
        for piece in sentence.split_whitespace() {
            let token = normalize_token(piece);
            if !token.is_empty() {
                tokens.push(token);
            }
        }
        if tokens.len() > start {
            sentence_bounds.push((start, tokens.len()));
        }
    }
    TokenizedText {
        tokens,
        sentence_bounds,
        raw_len: raw.chars().count(),
    }
}

/// Contiguous n-gram windows over a token slice. Returns an empty vector when
/// the slice is shorter than `n`.
///
/// # Errors
/// `n == 0` is an invalid argument.
pub fn ngrams<T>(tokens: &[T], n: usize) -> Result<Vec<&[T]>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "n-gram order must be at least 1".into(),
        ));
    }
    if tokens.len() < n {
        return Ok(Vec::new());
    }
    Ok(tokens.windows(n).collect())
}

/// A normalized stop-word membership set.
#[derive(Debug, Clone)]
pub struct StopwordSet {
    words: HashSet<String>,
}

impl StopwordSet {
    /// The built-in English inventory shipped with the crate.
    pub fn default_english() -> Self {
        Self::from_lines(DEFAULT_STOPWORDS.lines())
    }

    /// Builds a set from lines in the stop-word file format: one token per
    /// line, `#` starts a comment, blank lines ignored. Entries pass through
    /// [`normalize_token`] so lookups agree with document tokens.
    pub fn from_lines<I, S>(lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut words = HashSet::new();
        for line in lines {
            let entry = line.as_ref().split('#').next().unwrap_or_default().trim();
            if entry.is_empty() {
                continue;
            }
            let token = normalize_token(entry);
            if !token.is_empty() {
                words.insert(token);
            }
        }
        Self { words }
    }

    /// Loads an override file in the same format as the built-in list.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::StopwordFile {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Self::from_lines(text.lines()))
    }

    /// Membership test for an already-normalized token.
    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    /// Number of entries.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    /// True when the set has no entries.
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}
