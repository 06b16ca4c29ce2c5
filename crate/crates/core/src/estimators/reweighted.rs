//! Self-normalized reweighting estimators: SCE, WCE and the vertex-summary
//! variant.
//!
//! All three share one shape: every step contributes `indicator / weight` to
//! a label bin and `1 / weight` (restricted to the qualifying copies) to a
//! shared normalizer, where the weight folds in the sampler's non-normalized
//! stationary probability. The `*_totals` functions expose the unnormalized
//! sums; the `estimate_*` wrappers normalize and seed zero bins.

use std::collections::BTreeMap;

use super::{
    require_nonempty, zeroed_bins, DistributionEstimate, EstimatorId, RawTotals, VertexLabeler,
};
use crate::content::{ContentLabeler, ContentStore};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::samplers::SampleTrace;

/// Accumulates the special-copy sums: a copy contributes only when it is its
/// content's special copy, weighted by `1 / pi_hat` of the hosting step.
pub fn sce_totals(trace: &SampleTrace, store: &ContentStore, labeler: ContentLabeler) -> RawTotals {
    let mut totals = RawTotals::default();
    for step in &trace.steps {
        let inv = 1.0 / step.weight_hat;
        for &cid in store.copies_at(step.vertex) {
            if store.is_special(step.vertex, cid) {
                *totals
                    .by_label
                    .entry(labeler.label(store.content(cid)))
                    .or_insert(0.0) += inv;
                totals.normalizer += inv;
            }
        }
    }
    totals
}

/// Special copy estimator. Each content has exactly one special copy, so
/// collected special copies form an unbiased (after reweighting) sample of
/// contents.
pub fn estimate_sce(
    trace: &SampleTrace,
    store: &ContentStore,
    labeler: ContentLabeler,
) -> Result<DistributionEstimate> {
    require_nonempty(trace)?;
    let totals = sce_totals(trace, store, labeler);
    if totals.normalizer == 0.0 {
        return Err(Error::EmptySample);
    }
    Ok(finish(
        EstimatorId::Sce,
        trace,
        store.labels(labeler),
        totals,
    ))
}

/// Accumulates the copy sums with weight `1 / (pi_hat * f(c))` per collected
/// copy. `f(c) = 0` would poison the sums and is reported as a store
/// integrity violation.
pub fn wce_totals(
    trace: &SampleTrace,
    store: &ContentStore,
    labeler: ContentLabeler,
) -> Result<RawTotals> {
    let mut totals = RawTotals::default();
    for step in &trace.steps {
        for &cid in store.copies_at(step.vertex) {
            let content = store.content(cid);
            if content.copy_count == 0 {
                return Err(Error::Integrity(format!(
                    "content {cid} carries copy count 0"
                )));
            }
            let w = 1.0 / (step.weight_hat * content.copy_count as f64);
            *totals.by_label.entry(labeler.label(content)).or_insert(0.0) += w;
            totals.normalizer += w;
        }
    }
    Ok(totals)
}

/// Weighted copy estimator. Uses every collected copy; dividing by the copy
/// count cancels the advantage of heavily replicated content.
pub fn estimate_wce(
    trace: &SampleTrace,
    store: &ContentStore,
    labeler: ContentLabeler,
) -> Result<DistributionEstimate> {
    require_nonempty(trace)?;
    let totals = wce_totals(trace, store, labeler)?;
    if totals.normalizer == 0.0 {
        return Err(Error::EmptySample);
    }
    Ok(finish(
        EstimatorId::Wce,
        trace,
        store.labels(labeler),
        totals,
    ))
}

/// Accumulates the vertex-summary sums. Sampling a vertex exposes the
/// summaries of itself, its followees and its followers; vertex `w` appears
/// in `indeg(w) + outdeg(w) + 1` such neighborhoods, so each occurrence is
/// weighted by `1 / (pi_hat * f'(w))` with `f'(w) = indeg(w) + outdeg(w) + 1`.
/// A reciprocal neighbor is seen twice and contributes twice.
pub fn vertex_wce_totals(
    trace: &SampleTrace,
    g: &Graph,
    labeler: &VertexLabeler,
) -> Result<RawTotals> {
    let dv = g
        .directed_view()
        .ok_or_else(|| Error::Config("the vertex-summary estimator requires a directed graph".into()))?;
    let mut totals = RawTotals::default();
    let add = |totals: &mut RawTotals, w, inv_pi: f64| -> Result<()> {
        let weight = inv_pi / (dv.in_degree(w) + dv.out_degree(w) + 1) as f64;
        *totals.by_label.entry(labeler.label(g, w)?).or_insert(0.0) += weight;
        totals.normalizer += weight;
        Ok(())
    };
    for step in &trace.steps {
        let inv_pi = 1.0 / step.weight_hat;
        let s = step.vertex;
        for &w in dv.out_neighbors(s) {
            add(&mut totals, w, inv_pi)?;
        }
        for &w in dv.in_neighbors(s) {
            add(&mut totals, w, inv_pi)?;
        }
        add(&mut totals, s, inv_pi)?;
    }
    Ok(totals)
}

/// WCE applied to neighbor-carried vertex summaries: estimates the fraction
/// of vertices per vertex label.
pub fn estimate_vertex_wce(
    trace: &SampleTrace,
    g: &Graph,
    labeler: &VertexLabeler,
) -> Result<DistributionEstimate> {
    require_nonempty(trace)?;
    let totals = vertex_wce_totals(trace, g, labeler)?;
    // Every step contributes at least the sampled vertex itself.
    debug_assert!(totals.normalizer > 0.0);
    let labels: Vec<u32> = labeler.census(g)?.into_keys().collect();
    Ok(finish(EstimatorId::VertexWce, trace, labels, totals))
}

fn finish(
    estimator: EstimatorId,
    trace: &SampleTrace,
    labels: impl IntoIterator<Item = u32>,
    totals: RawTotals,
) -> DistributionEstimate {
    let mut bins: BTreeMap<u32, f64> = zeroed_bins(labels);
    for (label, value) in totals.by_label {
        bins.insert(label, value / totals.normalizer);
    }
    DistributionEstimate {
        estimator,
        sampler: trace.sampler,
        n_steps: trace.n_steps(),
        seed: trace.seed,
        bins,
    }
}
