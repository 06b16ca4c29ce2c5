//! Simple and Metropolis-Hastings random walks on the undirected view.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{validate_stop, SampleTrace, SamplerConfig, SamplerId, StartPolicy, StopRule, TraceBuilder};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// Simple random walk: the next vertex is a uniform neighbor of the current
/// one. Steps are recorded with weight `deg(v)`, the walk's non-normalized
/// stationary probability.
pub fn sample_rw(g: &Graph, cfg: &SamplerConfig, seed: u64) -> Result<SampleTrace> {
    walk(g, cfg, seed, SamplerId::Rw)
}

/// Metropolis-Hastings random walk targeting the uniform distribution:
/// a proposed uniform neighbor `v` of the current vertex `u` is accepted
/// with probability `min(deg(u)/deg(v), 1)`, otherwise the walk stays at
/// `u`. Every step, including self-repeats, is recorded with weight 1.
pub fn sample_mhrw(g: &Graph, cfg: &SamplerConfig, seed: u64) -> Result<SampleTrace> {
    walk(g, cfg, seed, SamplerId::Mhrw)
}

/// Probability that MHRW accepts a move from degree `deg_u` to `deg_v`.
#[inline]
pub fn mhrw_acceptance(deg_u: usize, deg_v: usize) -> f64 {
    (deg_u as f64 / deg_v as f64).min(1.0)
}

fn walk(g: &Graph, cfg: &SamplerConfig, seed: u64, id: SamplerId) -> Result<SampleTrace> {
    validate_stop(cfg.stop, g.num_vertices())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = resolve_start(g, cfg.start, &mut rng)?;
    if let StopRule::DistinctBudget(b) = cfg.stop {
        let cm = g.components();
        let reachable = cm.size_of(cm.component_of(start));
        if b > reachable {
            return Err(Error::BudgetUnreachable {
                budget: b,
                reachable,
            });
        }
    }

    let mut current = start;
    let advance = |current: &mut VertexId, rng: &mut ChaCha8Rng| match id {
        SamplerId::Rw => {
            let nb = g.neighbors(*current);
            *current = nb[rng.gen_range(0..nb.len())];
        }
        SamplerId::Mhrw => {
            let nb = g.neighbors(*current);
            let candidate = nb[rng.gen_range(0..nb.len())];
            let accept = mhrw_acceptance(g.degree(*current), g.degree(candidate));
            if rng.gen::<f64>() < accept {
                *current = candidate;
            }
        }
        _ => unreachable!("walk() only serves RW and MHRW"),
    };

    for _ in 0..cfg.burn_in {
        advance(&mut current, &mut rng);
    }
    let mut tb = TraceBuilder::new(g.num_vertices(), cfg.stop);
    loop {
        advance(&mut current, &mut rng);
        let weight = match id {
            SamplerId::Rw => g.degree(current) as f64,
            _ => 1.0,
        };
        if tb.record(current, weight) {
            return Ok(tb.finish(id, seed));
        }
    }
}

/// Fixed starts must not be isolated; uniform starts are drawn from the
/// largest connected component.
fn resolve_start(g: &Graph, policy: StartPolicy, rng: &mut ChaCha8Rng) -> Result<VertexId> {
    let start = match policy {
        StartPolicy::Fixed(v) => {
            if v.index() >= g.num_vertices() {
                return Err(Error::Config(format!(
                    "start vertex {v} out of range (|V| = {})",
                    g.num_vertices()
                )));
            }
            v
        }
        StartPolicy::UniformRandom => {
            let lcc = g.components().lcc_vertices();
            lcc[rng.gen_range(0..lcc.len())]
        }
    };
    if g.degree(start) == 0 {
        return Err(Error::IsolatedStart(start.0));
    }
    Ok(start)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::build(3, &[(0, 1), (1, 2)], false).unwrap()
    }

    #[test]
    fn acceptance_probability_formula() {
        assert_eq!(mhrw_acceptance(2, 4), 0.5);
        assert_eq!(mhrw_acceptance(4, 2), 1.0);
        assert_eq!(mhrw_acceptance(3, 3), 1.0);
    }

    #[test]
    fn star_center_picks_each_leaf_uniformly() {
        let star = Graph::build(4, &[(0, 1), (0, 2), (0, 3)], false).unwrap();
        let cfg = SamplerConfig {
            start: StartPolicy::Fixed(VertexId(0)),
            ..SamplerConfig::with_budget(2)
        };
        let mut counts = [0usize; 4];
        let trials = 9000;
        for seed in 0..trials {
            let trace = sample_rw(&star, &cfg, seed).unwrap();
            counts[trace.steps[0].vertex.index()] += 1;
        }
        assert_eq!(counts[0], 0);
        for &c in &counts[1..] {
            let freq = c as f64 / trials as f64;
            assert!((freq - 1.0 / 3.0).abs() < 0.02, "leaf frequency {freq}");
        }
    }

    #[test]
    fn rw_long_run_matches_degree_stationary_distribution() {
        // On the 3-path the stationary distribution is deg(v)/2|E| =
        // (1/4, 1/2, 1/4).
        let g = path3();
        let cfg = SamplerConfig {
            stop: StopRule::TotalSteps(1_000_000),
            start: StartPolicy::Fixed(VertexId(0)),
            ..SamplerConfig::with_budget(1)
        };
        let trace = sample_rw(&g, &cfg, 8).unwrap();
        let mut counts = [0usize; 3];
        for s in &trace.steps {
            counts[s.vertex.index()] += 1;
        }
        let expected = [0.25, 0.5, 0.25];
        for (c, e) in counts.iter().zip(expected) {
            let freq = *c as f64 / trace.n_steps() as f64;
            assert!((freq - e).abs() / e < 0.01, "freq {freq} vs {e}");
        }
    }

    #[test]
    fn mhrw_long_run_is_uniform() {
        let g = path3();
        let cfg = SamplerConfig {
            stop: StopRule::TotalSteps(1_000_000),
            start: StartPolicy::Fixed(VertexId(1)),
            ..SamplerConfig::with_budget(1)
        };
        let trace = sample_mhrw(&g, &cfg, 15).unwrap();
        let mut counts = [0usize; 3];
        for s in &trace.steps {
            counts[s.vertex.index()] += 1;
        }
        for c in counts {
            let freq = c as f64 / trace.n_steps() as f64;
            assert!((freq - 1.0 / 3.0).abs() / (1.0 / 3.0) < 0.01, "freq {freq}");
        }
    }

    #[test]
    fn isolated_start_is_an_error() {
        let g = Graph::build(3, &[(0, 1)], false).unwrap();
        let cfg = SamplerConfig {
            start: StartPolicy::Fixed(VertexId(2)),
            ..SamplerConfig::with_budget(1)
        };
        assert!(matches!(
            sample_rw(&g, &cfg, 1),
            Err(Error::IsolatedStart(2))
        ));
    }

    #[test]
    fn budget_beyond_component_is_unreachable() {
        // Components {0,1} and {2,3,4}; a walk from 0 can never collect 3.
        let g = Graph::build(5, &[(0, 1), (2, 3), (3, 4)], false).unwrap();
        let cfg = SamplerConfig {
            start: StartPolicy::Fixed(VertexId(0)),
            ..SamplerConfig::with_budget(3)
        };
        match sample_rw(&g, &cfg, 1) {
            Err(Error::BudgetUnreachable { budget, reachable }) => {
                assert_eq!((budget, reachable), (3, 2));
            }
            other => panic!("expected BudgetUnreachable, got {other:?}"),
        }
        // Uniform starts land in the LCC, where the budget fits.
        let ok = sample_rw(&g, &SamplerConfig::with_budget(3), 1).unwrap();
        assert_eq!(ok.distinct_count(), 3);
        assert!(ok.distinct.iter().all(|v| v.index() >= 2));
    }

    #[test]
    fn mhrw_self_repeats_count_as_steps() {
        // Star: from a leaf every proposal goes to the hub and is accepted;
        // from the hub most proposals are rejected, repeating the hub.
        let star = Graph::build(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], false).unwrap();
        let cfg = SamplerConfig {
            stop: StopRule::TotalSteps(2000),
            start: StartPolicy::Fixed(VertexId(1)),
            ..SamplerConfig::with_budget(1)
        };
        let trace = sample_mhrw(&star, &cfg, 3).unwrap();
        assert_eq!(trace.n_steps(), 2000);
        let repeats = trace
            .steps
            .windows(2)
            .filter(|w| w[0].vertex == w[1].vertex)
            .count();
        assert!(repeats > 0, "expected rejected proposals to repeat steps");
    }
}
