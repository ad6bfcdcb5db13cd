use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::fmindex::SamplingStrategy;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}")]
    Read {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("input is empty")]
    EmptyInput,

    #[error("malformed FASTA: expected '>' as first non-blank byte, found {found:?}")]
    MalformedFasta { found: char },

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("pattern length {length} exceeds text length {text_len}")]
    PatternTooLong { length: usize, text_len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sampling distance must be at least 2, got {0}")]
    SamplingDistance(usize),

    #[error("index {index} out of range 0..{bound}")]
    OutOfRange { index: usize, bound: usize },

    #[error("{engine} requires value sampling, index uses {found} sampling")]
    UnsupportedStrategy {
        engine: &'static str,
        found: SamplingStrategy,
    },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error(transparent)]
    Format(#[from] FormatError),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Failures while decoding a serialized index.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic bytes {0:?}")]
    BadMagic([u8; 4]),

    #[error("unsupported format version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },

    #[error("stream truncated while reading {0}")]
    Truncated(&'static str),

    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    ChecksumMismatch { stored: u32, computed: u32 },

    #[error("inconsistent index: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
