//! Uniform independent vertex sampling (UNI).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{validate_stop, SampleTrace, SamplerConfig, SamplerId, TraceBuilder};
use crate::error::Result;
use crate::graph::{Graph, VertexId};

/// Draws vertices i.i.d. uniformly from `V` with replacement. Every draw is
/// recorded with weight 1.
pub fn sample_uni(g: &Graph, cfg: &SamplerConfig, seed: u64) -> Result<SampleTrace> {
    let n = g.num_vertices();
    validate_stop(cfg.stop, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cfg.burn_in {
        rng.gen_range(0..n as u32);
    }
    let mut tb = TraceBuilder::new(n, cfg.stop);
    loop {
        let v = VertexId(rng.gen_range(0..n as u32));
        if tb.record(v, 1.0) {
            return Ok(tb.finish(SamplerId::Uni, seed));
        }
    }
}
