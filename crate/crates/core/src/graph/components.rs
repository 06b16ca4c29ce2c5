//! Connected components of the undirected view.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use super::{Graph, VertexId};

/// Partition of the vertex set into connected components.
///
/// A component's id is the smallest vertex id it contains, which makes the
/// labeling deterministic. Ties for the largest component break toward the
/// smaller id.
#[derive(Clone, Debug)]
pub struct ComponentMap {
    ids: Vec<u32>,
    sizes: BTreeMap<u32, usize>,
    lcc_id: u32,
    lcc_vertices: Vec<VertexId>,
}

impl ComponentMap {
    pub(crate) fn compute(g: &Graph) -> Self {
        let n = g.num_vertices();
        let mut ids = vec![u32::MAX; n];
        let mut sizes = BTreeMap::new();
        let mut queue = VecDeque::new();
        for start in 0..n as u32 {
            if ids[start as usize] != u32::MAX {
                continue;
            }
            // Scanning vertices in ascending order makes `start` the
            // smallest id in its component.
            let mut size = 0usize;
            ids[start as usize] = start;
            queue.push_back(VertexId(start));
            while let Some(v) = queue.pop_front() {
                size += 1;
                for &w in g.neighbors(v) {
                    if ids[w.index()] == u32::MAX {
                        ids[w.index()] = start;
                        queue.push_back(w);
                    }
                }
            }
            sizes.insert(start, size);
        }

        let (&lcc_id, _) = sizes
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .expect("graph has at least one vertex");
        let lcc_vertices = ids
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == lcc_id)
            .map(|(v, _)| VertexId(v as u32))
            .collect();

        Self {
            ids,
            sizes,
            lcc_id,
            lcc_vertices,
        }
    }

    /// Component id of `v` (the smallest vertex id in `v`'s component).
    #[inline]
    pub fn component_of(&self, v: VertexId) -> u32 {
        self.ids[v.index()]
    }

    /// Number of vertices in the given component (0 for unknown ids).
    pub fn size_of(&self, component: u32) -> usize {
        self.sizes.get(&component).copied().unwrap_or(0)
    }

    /// Component id -> size, ordered by id.
    pub fn sizes(&self) -> &BTreeMap<u32, usize> {
        &self.sizes
    }

    pub fn num_components(&self) -> usize {
        self.sizes.len()
    }

    pub fn lcc_id(&self) -> u32 {
        self.lcc_id
    }

    pub fn lcc_size(&self) -> usize {
        self.sizes[&self.lcc_id]
    }

    /// Members of the largest component, ascending.
    pub fn lcc_vertices(&self) -> &[VertexId] {
        &self.lcc_vertices
    }
}

#[cfg(test)]
mod tests {
    use crate::graph::{Graph, VertexId};

    #[test]
    fn two_components_pick_larger_as_lcc() {
        let g = Graph::build(5, &[(0, 1), (2, 3), (3, 4)], false).unwrap();
        let cm = g.components();
        assert_eq!(cm.num_components(), 2);
        assert_eq!(cm.lcc_id(), 2);
        assert_eq!(cm.lcc_size(), 3);
        assert_eq!(cm.lcc_vertices(), &[VertexId(2), VertexId(3), VertexId(4)]);
        assert_eq!(cm.component_of(VertexId(1)), 0);
        assert_eq!(cm.component_of(VertexId(4)), 2);
    }

    #[test]
    fn triangle_is_one_component() {
        let g = Graph::build(3, &[(0, 1), (1, 2), (2, 0)], false).unwrap();
        let cm = g.components();
        assert_eq!(cm.num_components(), 1);
        assert_eq!(cm.lcc_size(), 3);
    }

    #[test]
    fn isolated_vertices_tie_break_to_smallest_id() {
        // No edges at all: five singleton components.
        let g = Graph::assemble(5, &[], false, (0..5).collect()).unwrap();
        let cm = g.components();
        assert_eq!(cm.num_components(), 5);
        assert_eq!(cm.lcc_id(), 0);
        assert_eq!(cm.lcc_size(), 1);
    }

    #[test]
    fn components_partition_the_vertex_set() {
        let g = Graph::build(6, &[(0, 1), (1, 2), (4, 5)], false).unwrap();
        let cm = g.components();
        let total: usize = cm.sizes().values().sum();
        assert_eq!(total, g.num_vertices());
    }
}
