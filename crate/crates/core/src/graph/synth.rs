//! Synthetic test graphs for desk-scale experiments.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Graph;

/// Connected, non-bipartite undirected graph on `n >= 3` vertices with
/// roughly `n * avg_degree / 2` edges: a random recursive tree plus a
/// triangle on `{0,1,2}` plus random extra edges. Duplicate draws collapse,
/// so the realized edge count can fall slightly short of the target.
pub fn random_connected_graph(n: usize, avg_degree: f64, seed: u64) -> Graph {
    assert!(n >= 3, "need at least 3 vertices");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for v in 1..n as u32 {
        edges.push((rng.gen_range(0..v), v));
    }
    edges.push((0, 1));
    edges.push((1, 2));
    edges.push((0, 2));
    let target = ((n as f64 * avg_degree) / 2.0).round() as usize;
    while edges.len() < target {
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u != v {
            edges.push((u, v));
        }
    }
    Graph::build(n, &edges, false).expect("synthetic graph is valid")
}

/// Near-regular random graph: the union of `degree` random perfect
/// matchings on an even vertex count, plus a triangle on `{0,1,2}` to rule
/// out bipartiteness. Matchings occasionally collide and collapse, so
/// realized degrees sit a touch below `degree`. This is the graph of choice
/// for stationarity checks: the tight degree spread keeps per-vertex visit
/// counts (and MHRW rejection rates) as uniform as a random graph allows.
pub fn random_near_regular_graph(n: usize, degree: usize, seed: u64) -> Graph {
    assert!(n >= 4 && n % 2 == 0, "need an even vertex count of at least 4");
    assert!(degree >= 1 && degree < n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(n / 2 * degree + 3);
    let mut perm: Vec<u32> = (0..n as u32).collect();
    for _ in 0..degree {
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        for pair in perm.chunks(2) {
            edges.push((pair[0], pair[1]));
        }
    }
    edges.push((0, 1));
    edges.push((1, 2));
    edges.push((0, 2));
    Graph::build(n, &edges, false).expect("synthetic graph is valid")
}

/// Weakly connected directed graph on `n >= 2` vertices with roughly
/// `n * avg_out_degree` directed edges. Tree edges get a random orientation.
pub fn random_directed_graph(n: usize, avg_out_degree: f64, seed: u64) -> Graph {
    assert!(n >= 2, "need at least 2 vertices");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for v in 1..n as u32 {
        let parent = rng.gen_range(0..v);
        if rng.gen::<bool>() {
            edges.push((parent, v));
        } else {
            edges.push((v, parent));
        }
    }
    let target = (n as f64 * avg_out_degree).round() as usize;
    while edges.len() < target {
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u != v {
            edges.push((u, v));
        }
    }
    Graph::build(n, &edges, true).expect("synthetic graph is valid")
}

/// True when the undirected view is 2-colorable. Stationarity checks need
/// non-bipartite graphs.
pub fn is_bipartite(g: &Graph) -> bool {
    let n = g.num_vertices();
    let mut color = vec![u8::MAX; n];
    let mut stack = Vec::new();
    for start in g.vertices() {
        if color[start.index()] != u8::MAX {
            continue;
        }
        color[start.index()] = 0;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if color[w.index()] == u8::MAX {
                    color[w.index()] = 1 - color[v.index()];
                    stack.push(w);
                } else if color[w.index()] == color[v.index()] {
                    return false;
                }
            }
        }
    }
    true
}
