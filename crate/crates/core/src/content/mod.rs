//! Synthetic content and its placement on graph vertices.
//!
//! A *content* is a distinct item replicated as `f` copies on `f` distinct
//! vertices, exactly one of which holds the designated *special* copy (the
//! original). Every copy records `f`, mirroring networks where each replica
//! carries its item's total copy count.

mod cds;
mod io;
mod pareto;

pub use cds::{generate_cds1, generate_cds2, generate_cds3, generate_cds4};
pub use io::{load_store, save_store};
pub use pareto::{ParetoConfig, ParetoSampler};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexId;

/// Content placement scheme identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeId {
    /// Uniform placement of each copy.
    Cds1,
    /// Special copy plus the nearest vertices by BFS distance.
    Cds2,
    /// Independent cascade on the undirected view.
    Cds3,
    /// Independent cascade toward followers on the directed graph.
    Cds4,
}

impl SchemeId {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::Cds1 => "cds1",
            SchemeId::Cds2 => "cds2",
            SchemeId::Cds3 => "cds3",
            SchemeId::Cds4 => "cds4",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cds1" => Ok(SchemeId::Cds1),
            "cds2" => Ok(SchemeId::Cds2),
            "cds3" => Ok(SchemeId::Cds3),
            "cds4" => Ok(SchemeId::Cds4),
            other => Err(format!("unknown scheme {other:?} (expected cds1..cds4)")),
        }
    }
}

/// One replicated item.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Content {
    pub id: u32,
    /// Stored label; equals the copy count unless categorical labels were
    /// assigned afterwards.
    pub label: u32,
    /// `f`: the total number of copies, recorded in every copy.
    pub copy_count: u32,
    /// Hosting vertices, distinct, in placement order.
    pub copies: Vec<VertexId>,
    /// Host of the unique special copy.
    pub special_vertex: VertexId,
}

/// Maps a content to the label under study.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContentLabeler {
    /// `L(c) = f(c)`.
    CopyCount,
    /// The label stored on the content (categorical schemes).
    Stored,
}

impl ContentLabeler {
    #[inline]
    pub fn label(self, content: &Content) -> u32 {
        match self {
            ContentLabeler::CopyCount => content.copy_count,
            ContentLabeler::Stored => content.label,
        }
    }
}

/// Provenance recorded in store headers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoreMeta {
    pub graph_name: String,
    pub scheme: String,
    pub seed: u64,
}

/// All generated content plus a vertex -> content index.
#[derive(Clone, Debug, PartialEq)]
pub struct ContentStore {
    contents: Vec<Content>,
    per_vertex: Vec<Vec<u32>>,
    meta: StoreMeta,
}

impl ContentStore {
    /// Builds the per-vertex index and validates every invariant:
    /// `|copies| = f >= 1`, copies distinct, the special vertex holds a copy.
    pub fn assemble(
        contents: Vec<Content>,
        num_vertices: usize,
        meta: StoreMeta,
    ) -> Result<Self> {
        let mut per_vertex = vec![Vec::new(); num_vertices];
        for (idx, c) in contents.iter().enumerate() {
            if c.id as usize != idx {
                return Err(Error::Integrity(format!(
                    "content id {} at position {idx}",
                    c.id
                )));
            }
            if c.copy_count == 0 || c.copies.len() != c.copy_count as usize {
                return Err(Error::Integrity(format!(
                    "content {} has f = {} but {} copies",
                    c.id,
                    c.copy_count,
                    c.copies.len()
                )));
            }
            let mut sorted = c.copies.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != c.copies.len() {
                return Err(Error::Integrity(format!(
                    "content {} places several copies on one vertex",
                    c.id
                )));
            }
            if !c.copies.contains(&c.special_vertex) {
                return Err(Error::Integrity(format!(
                    "content {} special copy at {} is not among its copies",
                    c.id, c.special_vertex
                )));
            }
            for &v in &c.copies {
                if v.index() >= num_vertices {
                    return Err(Error::Integrity(format!(
                        "content {} copy on vertex {} >= {num_vertices}",
                        c.id, v
                    )));
                }
                per_vertex[v.index()].push(c.id);
            }
        }
        Ok(Self {
            contents,
            per_vertex,
            meta,
        })
    }

    /// `H`: the number of distinct contents.
    pub fn num_contents(&self) -> usize {
        self.contents.len()
    }

    pub fn contents(&self) -> &[Content] {
        &self.contents
    }

    pub fn content(&self, id: u32) -> &Content {
        &self.contents[id as usize]
    }

    /// Ids of contents with a copy on `v`.
    pub fn copies_at(&self, v: VertexId) -> &[u32] {
        self.per_vertex
            .get(v.index())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Whether the copy of `content_id` hosted at `v` is the special one.
    #[inline]
    pub fn is_special(&self, v: VertexId, content_id: u32) -> bool {
        self.contents[content_id as usize].special_vertex == v
    }

    pub fn max_copy_count(&self) -> u32 {
        self.contents.iter().map(|c| c.copy_count).max().unwrap_or(0)
    }

    pub fn meta(&self) -> &StoreMeta {
        &self.meta
    }

    /// True label distribution `omega`: label -> fraction of contents.
    pub fn true_distribution(&self, labeler: ContentLabeler) -> BTreeMap<u32, f64> {
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for c in &self.contents {
            *counts.entry(labeler.label(c)).or_default() += 1;
        }
        let h = self.contents.len() as f64;
        counts
            .into_iter()
            .map(|(label, n)| (label, n as f64 / h))
            .collect()
    }

    /// Every label present in the store under `labeler`.
    pub fn labels(&self, labeler: ContentLabeler) -> Vec<u32> {
        let mut labels: Vec<u32> = self.contents.iter().map(|c| labeler.label(c)).collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    /// Replaces every stored label with one drawn uniformly from
    /// `0..num_labels`, independent of the copy count. Exercises estimators
    /// for labels that carry no duplication information.
    pub fn with_categorical_labels(mut self, num_labels: u32, seed: u64) -> Self {
        assert!(num_labels > 0, "need at least one label");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for c in &mut self.contents {
            c.label = rng.gen_range(0..num_labels);
        }
        self
    }

    /// Renames the graph recorded in the store header.
    pub fn with_graph_name(mut self, name: impl Into<String>) -> Self {
        self.meta.graph_name = name.into();
        self
    }
}
