//! Estimators of the content label distribution from a sample trace.
//!
//! All estimators are pure functions of `(trace, store, graph)` and can run
//! concurrently. Sums run over every trace step, revisits included; each
//! step's contribution is divided by the sampler's non-normalized weight so
//! the estimators self-normalize without knowing `|V|` or `|E|`.
//!
//! * [`estimate_dce`] tallies distinct collected content directly. It is
//!   biased: content with more copies is more likely to be collected.
//! * [`estimate_mle_copycount`] / [`estimate_mle_label`] remove that bias by
//!   maximum likelihood over the copy-sampling kernel `P[i,j]` (UNI only).
//! * [`estimate_sce`] uses only special copies, whose hosts are sampled like
//!   plain vertices.
//! * [`estimate_wce`] uses every collected copy, down-weighting each by its
//!   content's copy count.
//! * [`estimate_vertex_wce`] applies the same weighting to neighbor-carried
//!   vertex summaries on directed graphs.

mod dce;
mod mle;
mod reweighted;

pub use dce::estimate_dce;
pub use mle::{
    estimate_mle_copycount, estimate_mle_label, mle_pij, mixture_log_likelihood, CopySampleMatrix,
    MleConfig,
};
pub use reweighted::{
    estimate_sce, estimate_vertex_wce, estimate_wce, sce_totals, vertex_wce_totals, wce_totals,
};

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::samplers::{SampleTrace, SamplerId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorId {
    Dce,
    Mle,
    Sce,
    Wce,
    #[serde(rename = "vwce")]
    VertexWce,
}

impl EstimatorId {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorId::Dce => "DCE",
            EstimatorId::Mle => "MLE",
            EstimatorId::Sce => "SCE",
            EstimatorId::Wce => "WCE",
            EstimatorId::VertexWce => "VWCE",
        }
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dce" => Ok(EstimatorId::Dce),
            "mle" => Ok(EstimatorId::Mle),
            "sce" => Ok(EstimatorId::Sce),
            "wce" => Ok(EstimatorId::Wce),
            "vwce" => Ok(EstimatorId::VertexWce),
            other => Err(format!(
                "unknown estimator {other:?} (expected dce, mle, sce, wce or vwce)"
            )),
        }
    }
}

/// Normalized label distribution estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionEstimate {
    pub estimator: EstimatorId,
    pub sampler: SamplerId,
    pub n_steps: usize,
    pub seed: u64,
    /// label -> estimated probability; sums to 1, labels known to exist but
    /// never sampled report 0.
    pub bins: BTreeMap<u32, f64>,
}

impl DistributionEstimate {
    pub fn probability(&self, label: u32) -> f64 {
        self.bins.get(&label).copied().unwrap_or(0.0)
    }

    /// `label,omega_hat` CSV with a metadata comment line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "# estimator={} sampler={} n_steps={} seed={}",
            self.estimator, self.sampler, self.n_steps, self.seed
        )?;
        writeln!(w, "label,omega_hat")?;
        for (label, p) in &self.bins {
            writeln!(w, "{label},{p}")?;
        }
        Ok(())
    }
}

/// Unnormalized per-label sums plus the shared normalizer, exposed so exact
/// single-step expectation identities can be checked against the same code
/// path the estimators use.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawTotals {
    pub by_label: BTreeMap<u32, f64>,
    pub normalizer: f64,
}

/// Maps a vertex to the label under study for the vertex-summary estimator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VertexLabeler {
    OutDegree,
    InDegree,
    /// Explicit per-vertex labels, indexed by dense vertex id.
    Table(Vec<u32>),
}

impl VertexLabeler {
    pub fn label(&self, g: &Graph, v: VertexId) -> Result<u32> {
        match self {
            VertexLabeler::OutDegree => {
                let dv = g
                    .directed_view()
                    .ok_or_else(|| Error::Config("out-degree labels need a directed graph".into()))?;
                Ok(dv.out_degree(v) as u32)
            }
            VertexLabeler::InDegree => {
                let dv = g
                    .directed_view()
                    .ok_or_else(|| Error::Config("in-degree labels need a directed graph".into()))?;
                Ok(dv.in_degree(v) as u32)
            }
            VertexLabeler::Table(labels) => labels
                .get(v.index())
                .copied()
                .ok_or_else(|| Error::Config(format!("label table is missing vertex {v}"))),
        }
    }

    /// True label density `tau`: label -> fraction of vertices.
    pub fn census(&self, g: &Graph) -> Result<BTreeMap<u32, f64>> {
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for v in g.vertices() {
            *counts.entry(self.label(g, v)?).or_default() += 1;
        }
        let n = g.num_vertices() as f64;
        Ok(counts
            .into_iter()
            .map(|(label, c)| (label, c as f64 / n))
            .collect())
    }
}

fn require_nonempty(trace: &SampleTrace) -> Result<()> {
    if trace.steps.is_empty() {
        Err(Error::EmptySample)
    } else {
        Ok(())
    }
}

/// Bins seeded with 0.0 for every label in `labels`.
fn zeroed_bins(labels: impl IntoIterator<Item = u32>) -> BTreeMap<u32, f64> {
    labels.into_iter().map(|l| (l, 0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimator_id_round_trips() {
        for id in [
            EstimatorId::Dce,
            EstimatorId::Mle,
            EstimatorId::Sce,
            EstimatorId::Wce,
            EstimatorId::VertexWce,
        ] {
            assert_eq!(id.as_str().parse::<EstimatorId>().unwrap(), id);
        }
        assert!("avg".parse::<EstimatorId>().is_err());
    }

    #[test]
    fn vertex_labeler_census() {
        let g = Graph::build(3, &[(0, 1), (0, 2)], true).unwrap();
        let tau = VertexLabeler::OutDegree.census(&g).unwrap();
        assert_eq!(tau[&0], 2.0 / 3.0);
        assert_eq!(tau[&2], 1.0 / 3.0);

        let table = VertexLabeler::Table(vec![5, 5, 7]);
        let tau = table.census(&g).unwrap();
        assert_eq!(tau[&5], 2.0 / 3.0);
        assert_eq!(tau[&7], 1.0 / 3.0);
    }

    #[test]
    fn out_degree_labels_require_directed_graph() {
        let g = Graph::build(3, &[(0, 1), (1, 2)], false).unwrap();
        assert!(VertexLabeler::OutDegree.census(&g).is_err());
    }
}
