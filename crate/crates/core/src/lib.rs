//! Sampling and estimation toolkit for content replicated over large graphs.
//!
//! Crawling a large network yields only a small fraction of its vertices, and
//! the content hosted on those vertices is duplicated: popular items are seen
//! far more often than rare ones, so naive tallies of collected content are
//! heavily biased. This crate provides the building blocks to measure content
//! label distributions from such partial crawls:
//!
//! * [`graph`] — immutable edge-list graphs with directed and undirected
//!   views, degree tables and connected-component queries.
//! * [`samplers`] — uniform vertex sampling (UNI), simple random walk (RW),
//!   Metropolis-Hastings random walk (MHRW) and frontier sampling (FS), each
//!   emitting per-step reweighting factors.
//! * [`content`] — synthetic content placement schemes (uniform, proximity,
//!   undirected cascade, follower cascade) plus store persistence.
//! * [`estimators`] — the distinct-content estimator (DCE), an EM-based
//!   maximum-likelihood estimator (MLE), the special-copy estimator (SCE),
//!   the weighted-copy estimator (WCE) and its vertex-label variant.
//! * [`harness`] — declarative multi-run experiments that score estimators
//!   by per-bin NMSE, with deterministic seeded execution.

pub mod content;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod harness;
pub mod samplers;

pub use error::{Error, Result};
