//! Immutable graphs with directed and undirected views.
//!
//! A [`Graph`] is built once from an edge list and never mutated afterwards,
//! so it can be shared freely across concurrent sampler runs. Vertex ids are
//! dense (`0..|V|`); loaders remap sparse input ids and keep the original ids
//! around for reporting.

mod components;
mod load;
mod synth;

pub use components::ComponentMap;
pub use load::{load_edge_list, save_edge_list, ID_MAP_SUFFIX};
pub use synth::{
    is_bipartite, random_connected_graph, random_directed_graph, random_near_regular_graph,
};

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Dense vertex index in `0..|V|`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sorted CSR-style neighbor lists.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
}

impl Adjacency {
    /// Builds from (source, target) pairs. Pairs are sorted and deduplicated;
    /// the returned count is the number of unique pairs kept.
    fn from_pairs(num_vertices: usize, mut pairs: Vec<(u32, u32)>) -> (Self, usize) {
        pairs.sort_unstable();
        pairs.dedup();
        let kept = pairs.len();
        let mut offsets = vec![0usize; num_vertices + 1];
        for &(u, _) in &pairs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..num_vertices {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.into_iter().map(|(_, v)| VertexId(v)).collect();
        (Self { offsets, targets }, kept)
    }

    #[inline]
    fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.targets[self.offsets[v.index()]..self.offsets[v.index() + 1]]
    }

    #[inline]
    fn degree(&self, v: VertexId) -> usize {
        self.offsets[v.index() + 1] - self.offsets[v.index()]
    }
}

/// Out- and in-neighbor lists of a directed graph.
#[derive(Clone, Debug)]
pub struct DirectedView {
    out: Adjacency,
    incoming: Adjacency,
    edge_count: usize,
}

impl DirectedView {
    #[inline]
    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        self.out.neighbors(v)
    }

    #[inline]
    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        self.incoming.neighbors(v)
    }

    #[inline]
    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out.degree(v)
    }

    #[inline]
    pub fn in_degree(&self, v: VertexId) -> usize {
        self.incoming.degree(v)
    }

    /// Number of unique directed edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }
}

/// Counters for input anomalies observed while building a graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadStats {
    /// Self-loops removed from both views.
    pub self_loops_dropped: usize,
    /// Repeated edges collapsed to a single edge.
    pub duplicate_edges_collapsed: usize,
}

/// An immutable graph. The undirected view (symmetric, loop-free,
/// deduplicated) is always present; the directed view only when the graph
/// was built as directed.
pub struct Graph {
    num_vertices: usize,
    undirected: Adjacency,
    undirected_edges: usize,
    directed: Option<DirectedView>,
    original_ids: Vec<u64>,
    stats: LoadStats,
    components: OnceLock<ComponentMap>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("num_vertices", &self.num_vertices)
            .field("undirected_edges", &self.undirected_edges)
            .field("directed", &self.directed.is_some())
            .finish()
    }
}

impl Graph {
    /// Builds a graph over dense vertex ids `0..num_vertices`.
    pub fn build(num_vertices: usize, edges: &[(u32, u32)], directed: bool) -> Result<Self> {
        let original_ids = (0..num_vertices as u64).collect();
        Self::assemble(num_vertices, edges, directed, original_ids)
    }

    pub(crate) fn assemble(
        num_vertices: usize,
        edges: &[(u32, u32)],
        directed: bool,
        original_ids: Vec<u64>,
    ) -> Result<Self> {
        if num_vertices == 0 {
            return Err(Error::EmptyGraph);
        }
        debug_assert_eq!(original_ids.len(), num_vertices);

        let mut stats = LoadStats::default();
        let mut directed_pairs = Vec::new();
        let mut undirected_pairs = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u as usize >= num_vertices || v as usize >= num_vertices {
                return Err(Error::Config(format!(
                    "edge ({u}, {v}) references a vertex >= {num_vertices}"
                )));
            }
            if u == v {
                stats.self_loops_dropped += 1;
                continue;
            }
            if directed {
                directed_pairs.push((u, v));
            }
            undirected_pairs.push((u.min(v), u.max(v)));
        }

        let directed_view = if directed {
            let raw = directed_pairs.len();
            let swapped: Vec<(u32, u32)> = directed_pairs.iter().map(|&(u, v)| (v, u)).collect();
            let (out, kept) = Adjacency::from_pairs(num_vertices, directed_pairs);
            let (incoming, _) = Adjacency::from_pairs(num_vertices, swapped);
            stats.duplicate_edges_collapsed = raw - kept;
            Some(DirectedView {
                out,
                incoming,
                edge_count: kept,
            })
        } else {
            None
        };

        let raw_undirected = undirected_pairs.len();
        let mut sym = Vec::with_capacity(undirected_pairs.len() * 2);
        {
            let mut unique = undirected_pairs;
            unique.sort_unstable();
            unique.dedup();
            if directed_view.is_none() {
                stats.duplicate_edges_collapsed = raw_undirected - unique.len();
            }
            for &(a, b) in &unique {
                sym.push((a, b));
                sym.push((b, a));
            }
        }
        let (undirected, kept_sym) = Adjacency::from_pairs(num_vertices, sym);
        let undirected_edges = kept_sym / 2;

        Ok(Self {
            num_vertices,
            undirected,
            undirected_edges,
            directed: directed_view,
            original_ids,
            stats,
            components: OnceLock::new(),
        })
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    #[inline]
    pub fn is_directed(&self) -> bool {
        self.directed.is_some()
    }

    /// Neighbors in the undirected view, sorted ascending.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        self.undirected.neighbors(v)
    }

    /// Degree in the undirected view.
    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.undirected.degree(v)
    }

    /// Number of edges in the undirected view.
    #[inline]
    pub fn undirected_edge_count(&self) -> usize {
        self.undirected_edges
    }

    /// `sum_v deg(v) = 2|E|`.
    #[inline]
    pub fn total_degree(&self) -> usize {
        2 * self.undirected_edges
    }

    /// The directed view, when the graph was built as directed.
    #[inline]
    pub fn directed_view(&self) -> Option<&DirectedView> {
        self.directed.as_ref()
    }

    /// Original input id of a dense vertex.
    #[inline]
    pub fn original_id(&self, v: VertexId) -> u64 {
        self.original_ids[v.index()]
    }

    pub fn load_stats(&self) -> LoadStats {
        self.stats
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.num_vertices as u32).map(VertexId)
    }

    /// Connected components of the undirected view, computed once and cached.
    pub fn components(&self) -> &ComponentMap {
        self.components.get_or_init(|| ComponentMap::compute(self))
    }

    /// Induced subgraph over `keep` (deduplicated, order-insensitive).
    /// Vertices are re-indexed densely in ascending old-id order; original
    /// ids carry through.
    pub fn induced_subgraph(&self, keep: &[VertexId]) -> Result<Self> {
        let mut kept: Vec<VertexId> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let mut remap = vec![u32::MAX; self.num_vertices];
        for (new, old) in kept.iter().enumerate() {
            remap[old.index()] = new as u32;
        }
        let mut edges = Vec::new();
        if let Some(dv) = &self.directed {
            for &old in &kept {
                for &t in dv.out_neighbors(old) {
                    if remap[t.index()] != u32::MAX {
                        edges.push((remap[old.index()], remap[t.index()]));
                    }
                }
            }
        } else {
            for &old in &kept {
                for &t in self.neighbors(old) {
                    if old < t && remap[t.index()] != u32::MAX {
                        edges.push((remap[old.index()], remap[t.index()]));
                    }
                }
            }
        }
        let original_ids = kept.iter().map(|&v| self.original_id(v)).collect();
        Self::assemble(kept.len(), &edges, self.is_directed(), original_ids)
    }

    /// Subgraph induced by the largest connected component.
    pub fn lcc_subgraph(&self) -> Result<Self> {
        let keep = self.components().lcc_vertices().to_vec();
        self.induced_subgraph(&keep)
    }
}

/// Vertices (excluding `v`) reachable from `v` in the undirected view.
pub fn reachable_count(g: &Graph, v: VertexId) -> usize {
    let cm = g.components();
    cm.size_of(cm.component_of(v)) - 1
}
