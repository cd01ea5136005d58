//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by dataset loading, model construction, training, and I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("missing dataset file: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("{file}:{line}: malformed triple line (expected 3 tab-separated fields)")]
    MalformedLine { file: String, line: usize },

    #[error("{file}:{line}: {msg}")]
    MalformedDict {
        file: String,
        line: usize,
        msg: String,
    },

    #[error("unknown {kind} id {id} (vocabulary size {size})")]
    UnknownId {
        kind: &'static str,
        id: u32,
        size: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("no admissible negative for ({h}, {r}) [{direction}] after {attempts} draws")]
    NegativesExhausted {
        h: u32,
        r: u32,
        direction: &'static str,
        attempts: usize,
    },

    #[error("non-finite {what} in training step at epoch {epoch}: {detail}")]
    NonFinite {
        what: &'static str,
        epoch: usize,
        detail: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("checkpoint does not match dataset: {0}")]
    ChecksumMismatch(String),

    #[error("empty split: {0}")]
    EmptySplit(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
