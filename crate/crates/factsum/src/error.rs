//! Crate error type.

use thiserror::Error;

/// Errors surfaced by library operations.
///
/// Invalid *inputs* (records with missing fields, malformed lines) are
/// reported per item by the functions that consume them; this type covers
/// contract violations and environment failures.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The augmentation separator occurs inside the payload it is supposed
    /// to delimit, which would make the serialized target ambiguous.
    #[error("separator {separator:?} collides with {location} of record {record_id:?}")]
    SeparatorCollision {
        separator: String,
        /// What the separator collided with (entity chain or summary text).
        location: &'static str,
        record_id: String,
    },

    /// A stop-word override file could not be read.
    #[error("failed to read stop-word file {path}")]
    StopwordFile {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
