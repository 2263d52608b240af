//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A strand base is forbidden by the mask its own prefix induces.
    #[error("strand violates constraints at position {position}")]
    IllegalStrand { position: usize },

    #[error("symbol {value} outside adapter support")]
    SymbolOutOfRange { value: i64 },

    #[error("bad magic (expected \"SCN1\")")]
    BadMagic,

    #[error("unsupported record version {0}")]
    UnsupportedVersion(u8),

    #[error("record truncated")]
    Truncated,

    #[error("invalid base byte 0x{byte:02x} at offset {offset}")]
    InvalidBase { byte: u8, offset: usize },

    #[error("invalid provider params: {0}")]
    InvalidParams(String),

    #[error("duplicate sequence id {0:?}")]
    DuplicateId(String),

    #[error("fasta parse error: {0}")]
    Fasta(String),

    /// The masked channel has zero capacity; no finite strand can carry the
    /// payload (only reachable with degenerate constraint parameters).
    #[error("coder made no progress: constraint channel has zero capacity")]
    NoProgress,

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, CodecError>;
