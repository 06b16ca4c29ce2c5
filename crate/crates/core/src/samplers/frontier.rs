//! Frontier sampling: `T` dependent random walkers coordinated by degree.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{validate_stop, SampleTrace, SamplerConfig, SamplerId, StopRule, TraceBuilder};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// Frontier sampling. A vector `L` of `T` walker positions is seeded
/// uniformly from `V`; each step picks an entry with probability
/// proportional to its degree, moves it to a uniform neighbor `w`, and
/// records `w` with weight `deg(w)`. The walker-set distribution makes the
/// per-step vertex distribution converge to `deg(v)/2|E|`, like a single RW,
/// while being far less likely to get trapped in a small component.
pub fn sample_fs(g: &Graph, cfg: &SamplerConfig, seed: u64) -> Result<SampleTrace> {
    let n = g.num_vertices();
    validate_stop(cfg.stop, n)?;
    if cfg.walkers == 0 {
        return Err(Error::Config("frontier sampling needs at least 1 walker".into()));
    }
    if g.undirected_edge_count() == 0 {
        return Err(Error::WalkersStuck);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Isolated draws are resampled at initialization only; afterwards every
    // replacement is a neighbor of something and thus has degree >= 1.
    let mut walkers: Vec<(VertexId, u64)> = Vec::with_capacity(cfg.walkers);
    let mut total_degree: u64 = 0;
    for _ in 0..cfg.walkers {
        let v = loop {
            let v = VertexId(rng.gen_range(0..n as u32));
            if g.degree(v) > 0 {
                break v;
            }
        };
        let d = g.degree(v) as u64;
        total_degree += d;
        walkers.push((v, d));
    }

    if let StopRule::DistinctBudget(b) = cfg.stop {
        let cm = g.components();
        let mut comps: Vec<u32> = walkers.iter().map(|&(v, _)| cm.component_of(v)).collect();
        comps.sort_unstable();
        comps.dedup();
        let reachable: usize = comps.iter().map(|&c| cm.size_of(c)).sum();
        if b > reachable {
            return Err(Error::BudgetUnreachable {
                budget: b,
                reachable,
            });
        }
    }

    let step = |walkers: &mut Vec<(VertexId, u64)>, total: &mut u64, rng: &mut ChaCha8Rng| {
        let idx = select_weighted(walkers, rng.gen_range(0..*total));
        let (u, deg_u) = walkers[idx];
        let nb = g.neighbors(u);
        let w = nb[rng.gen_range(0..nb.len())];
        let deg_w = g.degree(w) as u64;
        *total = *total - deg_u + deg_w;
        walkers[idx] = (w, deg_w);
        w
    };

    for _ in 0..cfg.burn_in {
        step(&mut walkers, &mut total_degree, &mut rng);
    }
    let mut tb = TraceBuilder::new(n, cfg.stop);
    loop {
        let w = step(&mut walkers, &mut total_degree, &mut rng);
        if tb.record(w, g.degree(w) as f64) {
            return Ok(tb.finish(SamplerId::Fs, seed));
        }
    }
}

/// Index of the walker owning position `x` in the cumulative degree range
/// `[0, sum deg)`. Degree-0 entries are never selected.
fn select_weighted(walkers: &[(VertexId, u64)], x: u64) -> usize {
    let mut acc = 0u64;
    for (i, &(_, d)) in walkers.iter().enumerate() {
        acc += d;
        if x < acc {
            return i;
        }
    }
    unreachable!("x must be below the total degree")
}
