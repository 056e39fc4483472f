//! Entity-level factual consistency metrics and hallucination-mitigation
//! corpus transforms for abstractive summarization.
//!
//! The crate is organized bottom-up:
//!
//! * [`textproc`] — deterministic normalization, tokenization, sentence
//!   splitting, n-grams, and the stop-word inventory.
//! * [`entities`] — entity mentions and inventories, the heuristic
//!   (stop-word chunking) extractor, and annotation ingestion.
//! * [`matching`] — partial n-gram matching of entities against documents
//!   and against other entity sets, in Unique (distinct surface forms) and
//!   Non-Unique (per-mention) variants.
//! * [`metrics`] — source/target entity precision, recall, and F1 plus
//!   ROUGE-1/2/L/LSum, per-record scoring, and macro aggregation.
//! * [`dataset`] — corpus records and the mitigation transforms: text
//!   cleaning, length budgets, entity-based sentence filtering, pair
//!   filtering by source precision, entity-chain target augmentation, and
//!   corpus statistics.
//!
//! Every operation is pure and deterministic: the same inputs produce the
//! same outputs regardless of thread count or iteration order.

pub mod dataset;
pub mod entities;
pub mod error;
pub mod matching;
pub mod metrics;
pub mod textproc;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
