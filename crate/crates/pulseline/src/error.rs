//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by any stage of the pipeline.
#[derive(Error, Debug)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {what}: {detail}")]
    Parse { what: String, detail: String },

    #[error("frame {index} has dimensions {got_w}x{got_h}, expected {want_w}x{want_h}")]
    InconsistentDimensions {
        index: usize,
        got_w: usize,
        got_h: usize,
        want_w: usize,
        want_h: usize,
    },

    #[error("no frames found at {0}")]
    EmptySequence(PathBuf),

    #[error("invalid box {what}: ({x},{y},{w},{h})")]
    InvalidBox {
        what: String,
        x: i64,
        y: i64,
        w: i64,
        h: i64,
    },

    #[error("duplicate or non-increasing frame index {0} in annotations")]
    NonIncreasingFrame(u64),

    #[error("reference unavailable: {0}")]
    ReferenceUnavailable(String),

    #[error("series too short: {got} samples, need at least {need}")]
    SeriesTooShort { got: usize, need: usize },

    #[error("degenerate window: {0}")]
    DegenerateWindow(String),

    #[error("insufficient beats: {got} peaks detected, need at least 2")]
    InsufficientBeats { got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("{0}")]
    Pipeline(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(what: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Parse {
            what: what.into(),
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
