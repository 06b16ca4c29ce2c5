//! Content distribution schemes CDS I-IV.
//!
//! CDS I and II draw each content's copy count from a truncated Pareto
//! distribution; CDS III and IV grow the copy set with an independent
//! cascade, so the copy count is whatever the cascade reaches. In every
//! scheme the stored label and `f` are finalized after placement completes.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Content, ContentStore, ParetoConfig, ParetoSampler, StoreMeta};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// CDS I: every copy lands on a uniformly chosen vertex, without
/// replacement within one content. The first placed copy is the special one.
pub fn generate_cds1(
    g: &Graph,
    n_content: usize,
    pareto: &ParetoConfig,
    seed: u64,
) -> Result<ContentStore> {
    check_width(g, pareto)?;
    let sampler = ParetoSampler::new(pareto);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut contents = Vec::with_capacity(n_content);
    for id in 0..n_content {
        let f = sampler.sample(&mut rng);
        let copies = sample_distinct_vertices(&mut rng, g.num_vertices(), f as usize);
        contents.push(finish_content(id as u32, copies));
    }
    assemble(g, contents, "cds1", seed)
}

/// CDS II: the special copy goes to a uniformly chosen vertex able to reach
/// `f - 1` others; duplicates go to the nearest vertices by BFS distance,
/// ties broken by ascending vertex id within a BFS level.
pub fn generate_cds2(
    g: &Graph,
    n_content: usize,
    pareto: &ParetoConfig,
    seed: u64,
) -> Result<ContentStore> {
    check_width(g, pareto)?;
    let sampler = ParetoSampler::new(pareto);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cm = g.components();
    let retry_cap = 10 * g.num_vertices().max(100);
    let mut contents = Vec::with_capacity(n_content);
    for id in 0..n_content {
        let f = sampler.sample(&mut rng);
        if cm.lcc_size() < f as usize {
            return Err(Error::PlacementFailed {
                copies: f,
                attempts: 0,
            });
        }
        // Rejection sampling: uniform over the eligible vertices.
        let mut attempts = 0;
        let origin = loop {
            attempts += 1;
            if attempts > retry_cap {
                return Err(Error::PlacementFailed {
                    copies: f,
                    attempts,
                });
            }
            let v = VertexId(rng.gen_range(0..g.num_vertices() as u32));
            if cm.size_of(cm.component_of(v)) >= f as usize {
                break v;
            }
        };
        let mut copies = vec![origin];
        copies.extend(nearest_vertices(g, origin, f as usize - 1));
        contents.push(finish_content(id as u32, copies));
    }
    assemble(g, contents, "cds2", seed)
}

/// CDS III: the special copy seeds a uniformly chosen vertex; an independent
/// cascade on the undirected view then spreads copies, each newly infected
/// vertex getting a single chance per copy-free neighbor with probability
/// `p_spread`.
pub fn generate_cds3(
    g: &Graph,
    n_content: usize,
    p_spread: f64,
    seed: u64,
) -> Result<ContentStore> {
    check_probability(p_spread)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cascade = Cascade::new(g.num_vertices());
    let mut contents = Vec::with_capacity(n_content);
    for id in 0..n_content {
        let origin = VertexId(rng.gen_range(0..g.num_vertices() as u32));
        let copies = cascade.run(origin, p_spread, &mut rng, |v| g.neighbors(v));
        contents.push(finish_content(id as u32, copies));
    }
    assemble(g, contents, "cds3", seed)
}

/// CDS IV: like CDS III but on the directed graph, spreading from a vertex
/// to its incoming neighbors (followers).
pub fn generate_cds4(
    g: &Graph,
    n_content: usize,
    p_spread: f64,
    seed: u64,
) -> Result<ContentStore> {
    check_probability(p_spread)?;
    let dv = g
        .directed_view()
        .ok_or_else(|| Error::Config("cds4 requires a directed graph".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cascade = Cascade::new(g.num_vertices());
    let mut contents = Vec::with_capacity(n_content);
    for id in 0..n_content {
        let origin = VertexId(rng.gen_range(0..g.num_vertices() as u32));
        let copies = cascade.run(origin, p_spread, &mut rng, |v| dv.in_neighbors(v));
        contents.push(finish_content(id as u32, copies));
    }
    assemble(g, contents, "cds4", seed)
}

fn check_width(g: &Graph, pareto: &ParetoConfig) -> Result<()> {
    if pareto.max_copies as usize > g.num_vertices() {
        return Err(Error::Config(format!(
            "max copy count {} exceeds the number of vertices {}",
            pareto.max_copies,
            g.num_vertices()
        )));
    }
    Ok(())
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!(
            "spread probability must lie in [0, 1], got {p}"
        )));
    }
    Ok(())
}

/// Copy order: special vertex first, then placement order. The final copy
/// count is written back into the content, so every copy "knows" `f`.
fn finish_content(id: u32, copies: Vec<VertexId>) -> Content {
    let f = copies.len() as u32;
    Content {
        id,
        label: f,
        copy_count: f,
        special_vertex: copies[0],
        copies,
    }
}

fn assemble(g: &Graph, contents: Vec<Content>, scheme: &str, seed: u64) -> Result<ContentStore> {
    ContentStore::assemble(
        contents,
        g.num_vertices(),
        StoreMeta {
            graph_name: "unnamed".into(),
            scheme: scheme.into(),
            seed,
        },
    )
}

/// `k` distinct vertices, uniform over `0..n`, in draw order.
fn sample_distinct_vertices(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<VertexId> {
    debug_assert!(k <= n);
    if k * 2 <= n {
        let mut seen = vec![false; n];
        let mut picked = Vec::with_capacity(k);
        while picked.len() < k {
            let v = rng.gen_range(0..n as u32);
            if !seen[v as usize] {
                seen[v as usize] = true;
                picked.push(VertexId(v));
            }
        }
        picked
    } else {
        // Dense draws: partial Fisher-Yates.
        let mut pool: Vec<u32> = (0..n as u32).collect();
        for i in 0..k {
            let j = rng.gen_range(i..n);
            pool.swap(i, j);
        }
        pool[..k].iter().map(|&v| VertexId(v)).collect()
    }
}

/// The `count` nearest vertices to `origin` by undirected BFS distance,
/// excluding `origin` itself. Each BFS level is sorted ascending before
/// being consumed, which fixes the tie-break.
pub(crate) fn nearest_vertices(g: &Graph, origin: VertexId, count: usize) -> Vec<VertexId> {
    let mut picked = Vec::with_capacity(count);
    if count == 0 {
        return picked;
    }
    let mut visited = vec![false; g.num_vertices()];
    visited[origin.index()] = true;
    let mut level = vec![origin];
    let mut next = Vec::new();
    while !level.is_empty() && picked.len() < count {
        next.clear();
        for &v in &level {
            for &w in g.neighbors(v) {
                if !visited[w.index()] {
                    visited[w.index()] = true;
                    next.push(w);
                }
            }
        }
        next.sort_unstable();
        for &w in next.iter().take(count - picked.len()) {
            picked.push(w);
        }
        std::mem::swap(&mut level, &mut next);
    }
    picked
}

/// Reusable independent-cascade scratch state.
struct Cascade {
    has_copy: Vec<bool>,
}

impl Cascade {
    fn new(num_vertices: usize) -> Self {
        Self {
            has_copy: vec![false; num_vertices],
        }
    }

    /// FIFO cascade from `origin`. Each newly infected vertex gets exactly
    /// one Bernoulli(p) trial per neighbor that is copy-free at attempt
    /// time. Returns the infected vertices in infection order.
    fn run<'a, N>(
        &mut self,
        origin: VertexId,
        p: f64,
        rng: &mut ChaCha8Rng,
        neighbors: N,
    ) -> Vec<VertexId>
    where
        N: Fn(VertexId) -> &'a [VertexId],
    {
        let mut infected = vec![origin];
        self.has_copy[origin.index()] = true;
        let mut cursor = 0;
        while cursor < infected.len() {
            let v = infected[cursor];
            cursor += 1;
            for &w in neighbors(v) {
                if !self.has_copy[w.index()] && rng.gen::<f64>() < p {
                    self.has_copy[w.index()] = true;
                    infected.push(w);
                }
            }
        }
        for &v in &infected {
            self.has_copy[v.index()] = false;
        }
        infected
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::ContentLabeler;

    fn triangle() -> Graph {
        Graph::build(3, &[(0, 1), (1, 2), (2, 0)], false).unwrap()
    }

    #[test]
    fn cds1_single_content_single_copy() {
        let g = triangle();
        let store =
            generate_cds1(&g, 1, &ParetoConfig::new(1.0, 1).unwrap(), 5).unwrap();
        assert_eq!(store.num_contents(), 1);
        let c = &store.contents()[0];
        assert_eq!(c.copy_count, 1);
        assert_eq!(c.special_vertex, c.copies[0]);
    }

    #[test]
    fn cds1_exhausts_small_graph() {
        // f = 3 on a 3-vertex graph must occupy every vertex.
        let g = triangle();
        let cfg = ParetoConfig::new(0.0001, 3).unwrap();
        // With alpha near 0 the pmf still covers 1..3; force f = 3 by
        // retrying until one content draws it.
        let store = generate_cds1(&g, 200, &cfg, 11).unwrap();
        let full = store
            .contents()
            .iter()
            .find(|c| c.copy_count == 3)
            .expect("some content should reach f = 3");
        let mut hosts: Vec<u32> = full.copies.iter().map(|v| v.0).collect();
        hosts.sort_unstable();
        assert_eq!(hosts, vec![0, 1, 2]);
    }

    #[test]
    fn cds1_width_larger_than_graph_is_rejected() {
        let g = triangle();
        let cfg = ParetoConfig::new(1.0, 4).unwrap();
        assert!(matches!(
            generate_cds1(&g, 1, &cfg, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn cds1_copy_counts_match_the_pareto_pmf() {
        let g = crate::graph::random_connected_graph(200, 6.0, 3);
        let cfg = ParetoConfig::new(1.0, 10).unwrap();
        let n = 10_000;
        let store = generate_cds1(&g, n, &cfg, 77).unwrap();
        let pmf = cfg.pmf();
        let mut counts = vec![0usize; 10];
        for c in store.contents() {
            counts[(c.copy_count - 1) as usize] += 1;
        }
        for (k, &c) in counts.iter().enumerate() {
            let expect = n as f64 * pmf[k];
            let sigma = (n as f64 * pmf[k] * (1.0 - pmf[k])).sqrt();
            assert!(
                (c as f64 - expect).abs() <= 3.0 * sigma,
                "bin {}: {} vs {expect}",
                k + 1,
                c
            );
        }
    }

    #[test]
    fn nearest_vertices_follow_bfs_order_with_id_tie_break() {
        let path = Graph::build(4, &[(0, 1), (1, 2), (2, 3)], false).unwrap();
        assert_eq!(
            nearest_vertices(&path, VertexId(0), 2),
            vec![VertexId(1), VertexId(2)]
        );

        let star = Graph::build(4, &[(0, 1), (0, 2), (0, 3)], false).unwrap();
        assert_eq!(
            nearest_vertices(&star, VertexId(0), 2),
            vec![VertexId(1), VertexId(2)]
        );
        assert_eq!(nearest_vertices(&star, VertexId(0), 0), vec![]);
    }

    #[test]
    fn cds2_places_special_then_nearest() {
        let path = Graph::build(4, &[(0, 1), (1, 2), (2, 3)], false).unwrap();
        let cfg = ParetoConfig::new(0.5, 3).unwrap();
        let store = generate_cds2(&path, 100, &cfg, 21).unwrap();
        for c in store.contents() {
            assert_eq!(c.special_vertex, c.copies[0]);
            let expected: Vec<VertexId> = std::iter::once(c.copies[0])
                .chain(nearest_vertices(&path, c.copies[0], c.copy_count as usize - 1))
                .collect();
            assert_eq!(c.copies, expected);
        }
    }

    #[test]
    fn cds2_fails_when_no_vertex_can_reach_enough() {
        // Two disjoint edges: nobody reaches 2 others.
        let g = Graph::build(4, &[(0, 1), (2, 3)], false).unwrap();
        let cfg = ParetoConfig::new(0.0001, 3).unwrap();
        let result = generate_cds2(&g, 500, &cfg, 3);
        assert!(matches!(result, Err(Error::PlacementFailed { .. })));
    }

    #[test]
    fn cds3_spread_zero_gives_singletons() {
        let g = triangle();
        let store = generate_cds3(&g, 50, 0.0, 9).unwrap();
        assert!(store.contents().iter().all(|c| c.copy_count == 1));
    }

    #[test]
    fn cds3_spread_one_saturates_the_component() {
        let g = crate::graph::random_connected_graph(30, 4.0, 1);
        let store = generate_cds3(&g, 20, 1.0, 9).unwrap();
        assert!(store.contents().iter().all(|c| c.copy_count == 30));
    }

    #[test]
    fn cds3_expected_copies_match_exhaustive_enumeration() {
        // Oracle: enumerate all 2^6 outcomes of the six directed trials on
        // the triangle and weight reachable-set sizes by their probability.
        let g = triangle();
        let p = 0.5;
        let exact = triangle_cascade_distribution(p);
        let n = 30_000;
        let store = generate_cds3(&g, n, p, 123).unwrap();
        let mut counts = [0usize; 3];
        for c in store.contents() {
            counts[(c.copy_count - 1) as usize] += 1;
        }
        for (idx, &c) in counts.iter().enumerate() {
            let expect = n as f64 * exact[idx];
            let sigma = (n as f64 * exact[idx] * (1.0 - exact[idx])).sqrt();
            assert!(
                (c as f64 - expect).abs() <= 3.0 * sigma,
                "f = {}: {} vs {expect}",
                idx + 1,
                c
            );
        }
        let sim_mean = store
            .contents()
            .iter()
            .map(|c| c.copy_count as f64)
            .sum::<f64>()
            / n as f64;
        let exact_mean: f64 = exact
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum();
        assert!((sim_mean - exact_mean).abs() < 0.02);
    }

    /// Exact distribution of the cascade size on the triangle: every ordered
    /// pair (u, v) of adjacent vertices is an independent trial; the final
    /// copy set is what the seed reaches through successful trials.
    fn triangle_cascade_distribution(p: f64) -> [f64; 3] {
        let arcs = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)];
        let mut dist = [0.0f64; 3];
        for mask in 0u32..64 {
            let mut prob = 1.0;
            for bit in 0..6 {
                if mask & (1 << bit) != 0 {
                    prob *= p;
                } else {
                    prob *= 1.0 - p;
                }
            }
            // Reachability from seed 0 (symmetry covers the other seeds).
            let mut reached = [true, false, false];
            loop {
                let mut changed = false;
                for (bit, &(u, v)) in arcs.iter().enumerate() {
                    if mask & (1 << bit) != 0 && reached[u] && !reached[v] {
                        reached[v] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            let size = reached.iter().filter(|&&r| r).count();
            dist[size - 1] += prob;
        }
        dist
    }

    #[test]
    fn cds4_requires_directed_graph() {
        let g = triangle();
        assert!(matches!(
            generate_cds4(&g, 1, 0.5, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn cds4_single_follower_edge() {
        // 0 -> 1: vertex 0 is the only follower of 1.
        let g = Graph::build(2, &[(0, 1)], true).unwrap();
        let store = generate_cds4(&g, 40, 1.0, 13).unwrap();
        for c in store.contents() {
            match c.special_vertex {
                VertexId(1) => {
                    assert_eq!(c.copies, vec![VertexId(1), VertexId(0)]);
                    assert_eq!(c.copy_count, 2);
                }
                VertexId(0) => {
                    // No followers: the content never spreads.
                    assert_eq!(c.copy_count, 1);
                }
                other => panic!("unexpected seed {other}"),
            }
        }
        let store0 = generate_cds4(&g, 40, 0.0, 13).unwrap();
        assert!(store0.contents().iter().all(|c| c.copy_count == 1));
    }

    #[test]
    fn labels_default_to_copy_counts() {
        let g = triangle();
        let store = generate_cds3(&g, 30, 0.5, 77).unwrap();
        for c in store.contents() {
            assert_eq!(ContentLabeler::CopyCount.label(c), c.copy_count);
            assert_eq!(ContentLabeler::Stored.label(c), c.copy_count);
        }
    }
}
