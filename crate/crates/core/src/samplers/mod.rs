//! Vertex samplers: UNI, RW, MHRW and FS.
//!
//! Every sampler emits a [`SampleTrace`]: the ordered sequence of sampled
//! vertices together with each step's non-normalized weight. The weight is 1
//! for UNI and MHRW and `deg(v)` for RW and FS, so downstream estimators can
//! divide by it to undo the sampler's stationary bias without knowing `|V|`
//! or `|E|`.
//!
//! Runs stop once a target number of *distinct* vertices has been collected
//! (the crawl budget; repeat visits are free) or, alternatively, after a
//! fixed number of steps. Identical `(graph, config, seed)` always reproduces
//! the identical trace.

mod frontier;
mod uniform;
mod walk;

pub use frontier::sample_fs;
pub use uniform::sample_uni;
pub use walk::{mhrw_acceptance, sample_mhrw, sample_rw};

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerId {
    /// Uniform independent vertex sampling with replacement.
    Uni,
    /// Simple random walk on the undirected view.
    Rw,
    /// Metropolis-Hastings random walk targeting the uniform distribution.
    Mhrw,
    /// Frontier sampling: `T` degree-coordinated dependent walkers.
    Fs,
}

impl SamplerId {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplerId::Uni => "UNI",
            SamplerId::Rw => "RW",
            SamplerId::Mhrw => "MHRW",
            SamplerId::Fs => "FS",
        }
    }
}

impl fmt::Display for SamplerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SamplerId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "uni" => Ok(SamplerId::Uni),
            "rw" => Ok(SamplerId::Rw),
            "mhrw" => Ok(SamplerId::Mhrw),
            "fs" => Ok(SamplerId::Fs),
            other => Err(format!(
                "unknown sampler {other:?} (expected uni, rw, mhrw or fs)"
            )),
        }
    }
}

/// Where a walk starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartPolicy {
    /// RW/MHRW: uniform over the largest connected component.
    /// FS seeds its walker vector uniformly over all of `V` regardless.
    UniformRandom,
    Fixed(VertexId),
}

/// Stopping rule for a sampling run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    /// Stop at the step where the n-th distinct vertex first appears
    /// (crawl-budget accounting).
    DistinctBudget(usize),
    /// Stop after exactly n recorded steps.
    TotalSteps(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    pub stop: StopRule,
    /// Number of walkers for FS; ignored by the other samplers.
    pub walkers: usize,
    pub start: StartPolicy,
    /// Unrecorded chain steps before sampling begins.
    pub burn_in: usize,
}

impl SamplerConfig {
    /// Distinct-vertex budget with the defaults used throughout: 1000 FS
    /// walkers, uniform start, no burn-in.
    pub fn with_budget(budget: usize) -> Self {
        Self {
            stop: StopRule::DistinctBudget(budget),
            walkers: 1000,
            start: StartPolicy::UniformRandom,
            burn_in: 0,
        }
    }

    /// Fixed step count (stationarity studies).
    pub fn with_steps(steps: usize) -> Self {
        Self {
            stop: StopRule::TotalSteps(steps),
            ..Self::with_budget(1)
        }
    }
}

/// One sampled vertex with its non-normalized stationary weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step {
    pub vertex: VertexId,
    pub weight_hat: f64,
}

/// Ordered record of a sampling run.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleTrace {
    pub sampler: SamplerId,
    pub seed: u64,
    pub steps: Vec<Step>,
    /// Distinct vertices in first-visit order.
    pub distinct: Vec<VertexId>,
}

impl SampleTrace {
    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn distinct_count(&self) -> usize {
        self.distinct.len()
    }

    /// Membership mask over `0..num_vertices` for the distinct set.
    pub fn distinct_mask(&self, num_vertices: usize) -> Vec<bool> {
        let mut mask = vec![false; num_vertices];
        for v in &self.distinct {
            mask[v.index()] = true;
        }
        mask
    }

    /// Debug dump: `step,vertex,weight_hat` CSV.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "step,vertex,weight_hat")?;
        for (i, step) in self.steps.iter().enumerate() {
            writeln!(w, "{},{},{}", i, step.vertex, step.weight_hat)?;
        }
        Ok(())
    }
}

/// Runs the sampler selected by `id`.
pub fn sample(g: &Graph, id: SamplerId, cfg: &SamplerConfig, seed: u64) -> Result<SampleTrace> {
    match id {
        SamplerId::Uni => sample_uni(g, cfg, seed),
        SamplerId::Rw => sample_rw(g, cfg, seed),
        SamplerId::Mhrw => sample_mhrw(g, cfg, seed),
        SamplerId::Fs => sample_fs(g, cfg, seed),
    }
}

fn validate_stop(stop: StopRule, num_vertices: usize) -> Result<()> {
    match stop {
        StopRule::DistinctBudget(b) => {
            if b == 0 {
                Err(Error::Config("budget must be at least 1".into()))
            } else if b > num_vertices {
                Err(Error::Config(format!(
                    "budget {b} exceeds the number of vertices {num_vertices}"
                )))
            } else {
                Ok(())
            }
        }
        StopRule::TotalSteps(n) => {
            if n == 0 {
                Err(Error::Config("step count must be at least 1".into()))
            } else {
                Ok(())
            }
        }
    }
}

/// Accumulates steps and tracks distinct visits against the stop rule.
struct TraceBuilder {
    steps: Vec<Step>,
    distinct: Vec<VertexId>,
    seen: Vec<bool>,
    stop: StopRule,
}

impl TraceBuilder {
    fn new(num_vertices: usize, stop: StopRule) -> Self {
        let cap = match stop {
            StopRule::DistinctBudget(b) => b,
            StopRule::TotalSteps(n) => n.min(num_vertices),
        };
        Self {
            steps: Vec::new(),
            distinct: Vec::with_capacity(cap),
            seen: vec![false; num_vertices],
            stop,
        }
    }

    /// Records one step; returns true when the stop rule is satisfied.
    fn record(&mut self, vertex: VertexId, weight_hat: f64) -> bool {
        self.steps.push(Step { vertex, weight_hat });
        if !self.seen[vertex.index()] {
            self.seen[vertex.index()] = true;
            self.distinct.push(vertex);
        }
        match self.stop {
            StopRule::DistinctBudget(b) => self.distinct.len() >= b,
            StopRule::TotalSteps(n) => self.steps.len() >= n,
        }
    }

    fn finish(self, sampler: SamplerId, seed: u64) -> SampleTrace {
        SampleTrace {
            sampler,
            seed,
            steps: self.steps,
            distinct: self.distinct,
        }
    }
}
