//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("start vertex {0} has no neighbors")]
    IsolatedStart(u32),

    #[error("sampling budget {budget} exceeds the {reachable} vertices reachable from the start set")]
    BudgetUnreachable { budget: usize, reachable: usize },

    #[error("frontier sampling cannot start: every vertex is isolated")]
    WalkersStuck,

    #[error("estimator {estimator} does not support sampler {sampler}")]
    UnsupportedSampler {
        estimator: &'static str,
        sampler: &'static str,
    },

    #[error("sample contains no usable content")]
    EmptySample,

    #[error("content store integrity violation: {0}")]
    Integrity(String),

    #[error("no vertex can host {copies} copies (gave up after {attempts} attempts)")]
    PlacementFailed { copies: u32, attempts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
