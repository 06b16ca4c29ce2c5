//! Maximum-likelihood estimation over the copy-sampling kernel.
//!
//! Under uniform vertex sampling with `n` distinct vertices out of `|V|`,
//! each copy of a content is included with probability `p = n/|V|`. For a
//! content with `j` copies that was observed at all, the number of sampled
//! copies `i` follows `P[i,j] = C(j,i) p^i q^(j-i) / (1 - q^j)` with
//! `q = 1 - p`. Observed multiplicity histograms are therefore mixtures of
//! the `P[.,j]` columns, and EM recovers the mixing weights. Only presented
//! for UNI; other samplers are rejected.

use std::collections::BTreeMap;

use super::{require_nonempty, zeroed_bins, DistributionEstimate, EstimatorId};
use crate::content::{ContentLabeler, ContentStore};
use crate::error::{Error, Result};
use crate::samplers::{SampleTrace, SamplerId};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MleConfig {
    /// Per-copy inclusion probability `n / |V|`, strictly inside (0, 1).
    pub p: f64,
    /// `M`: the largest copy count considered.
    pub max_copies: usize,
    pub em_max_iters: usize,
    /// Convergence threshold on the L1 change of the estimate.
    pub em_tol: f64,
}

impl MleConfig {
    pub fn new(p: f64, max_copies: usize) -> Self {
        Self {
            p,
            max_copies,
            em_max_iters: 10_000,
            em_tol: 1e-8,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.p.is_finite() || self.p <= 0.0 || self.p >= 1.0 {
            return Err(Error::Config(format!(
                "sampling probability must lie strictly in (0, 1), got {}",
                self.p
            )));
        }
        if self.max_copies == 0 {
            return Err(Error::Config("max_copies must be at least 1".into()));
        }
        Ok(())
    }
}

/// The kernel `P[i,j]` for `1 <= i <= j <= M`; every column sums to 1.
#[derive(Clone, Debug)]
pub struct CopySampleMatrix {
    max_copies: usize,
    /// `cols[j-1][i-1] = P[i,j]`, column length `j`.
    cols: Vec<Vec<f64>>,
}

impl CopySampleMatrix {
    #[inline]
    pub fn prob(&self, sampled: usize, total: usize) -> f64 {
        self.cols[total - 1][sampled - 1]
    }

    pub fn max_copies(&self) -> usize {
        self.max_copies
    }

    pub fn column_sum(&self, total: usize) -> f64 {
        self.cols[total - 1].iter().sum()
    }
}

/// Builds the conditioned binomial kernel. The binomial terms are computed
/// by the stable ratio recurrence rather than factorials, so large `M` stays
/// finite.
pub fn mle_pij(cfg: &MleConfig) -> Result<CopySampleMatrix> {
    cfg.validate()?;
    let p = cfg.p;
    let q = 1.0 - p;
    let mut cols = Vec::with_capacity(cfg.max_copies);
    for j in 1..=cfg.max_copies {
        // b(i) = C(j,i) p^i q^(j-i), built from b(0) = q^j.
        let mut col = Vec::with_capacity(j);
        let mut b = q.powi(j as i32);
        let seen = 1.0 - b;
        for i in 1..=j {
            b *= (j - i + 1) as f64 / i as f64 * (p / q);
            col.push(b / seen);
        }
        cols.push(col);
    }
    Ok(CopySampleMatrix {
        max_copies: cfg.max_copies,
        cols,
    })
}

/// Log-likelihood of the mixture weights given a multiplicity histogram
/// `(i, count)`.
pub fn mixture_log_likelihood(
    observations: &[(usize, f64)],
    pij: &CopySampleMatrix,
    weights: &[f64],
) -> f64 {
    observations
        .iter()
        .map(|&(i, g)| {
            let density: f64 = (i..=pij.max_copies)
                .map(|j| weights[j - 1] * pij.prob(i, j))
                .sum();
            g * density.ln()
        })
        .sum()
}

/// EM for mixture weights over the kernel columns: expectation distributes
/// each multiplicity-i count over the columns `j >= i` proportionally to
/// `w_j P[i,j]`; maximization renormalizes. Starts uniform, stops on L1
/// change below `tol` or after `max_iters`.
fn em_mixture(
    observations: &[(usize, f64)],
    pij: &CopySampleMatrix,
    max_iters: usize,
    tol: f64,
) -> Vec<f64> {
    let m = pij.max_copies;
    let total: f64 = observations.iter().map(|&(_, g)| g).sum();
    let mut weights = vec![1.0 / m as f64; m];
    for _ in 0..max_iters {
        let mut next = vec![0.0; m];
        for &(i, g) in observations {
            let density: f64 = (i..=m).map(|j| weights[j - 1] * pij.prob(i, j)).sum();
            if density <= 0.0 {
                continue;
            }
            for j in i..=m {
                next[j - 1] += g * weights[j - 1] * pij.prob(i, j) / density;
            }
        }
        for w in &mut next {
            *w /= total;
        }
        let l1: f64 = weights
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .sum();
        weights = next;
        if l1 < tol {
            break;
        }
    }
    weights
}

/// Sampled-copy multiplicity per content: how many of the content's hosts
/// fall inside the trace's distinct vertex set. Revisits do not inflate the
/// count, matching the per-vertex inclusion model behind `p = n/|V|`.
fn copy_multiplicities(trace: &SampleTrace, store: &ContentStore) -> Vec<usize> {
    let mut counts = vec![0usize; store.num_contents()];
    for &v in &trace.distinct {
        for &cid in store.copies_at(v) {
            counts[cid as usize] += 1;
        }
    }
    counts
}

fn require_uni(trace: &SampleTrace) -> Result<()> {
    if trace.sampler != SamplerId::Uni {
        return Err(Error::UnsupportedSampler {
            estimator: EstimatorId::Mle.as_str(),
            sampler: trace.sampler.as_str(),
        });
    }
    Ok(())
}

fn observed_histogram(
    counts: impl Iterator<Item = usize>,
    max_copies: usize,
) -> Result<Vec<(usize, f64)>> {
    let mut histogram: BTreeMap<usize, f64> = BTreeMap::new();
    for i in counts.filter(|&i| i > 0) {
        if i > max_copies {
            return Err(Error::Config(format!(
                "observed multiplicity {i} exceeds max_copies {max_copies}"
            )));
        }
        *histogram.entry(i).or_insert(0.0) += 1.0;
    }
    Ok(histogram.into_iter().collect())
}

/// MLE of the copy-count distribution (labels are the copy counts
/// themselves). Bins cover `1..=M`.
pub fn estimate_mle_copycount(
    trace: &SampleTrace,
    store: &ContentStore,
    cfg: &MleConfig,
) -> Result<DistributionEstimate> {
    require_nonempty(trace)?;
    require_uni(trace)?;
    let pij = mle_pij(cfg)?;
    let observations = observed_histogram(
        copy_multiplicities(trace, store).into_iter(),
        cfg.max_copies,
    )?;
    if observations.is_empty() {
        return Err(Error::EmptySample);
    }
    let weights = em_mixture(&observations, &pij, cfg.em_max_iters, cfg.em_tol);
    let bins = (1..=cfg.max_copies as u32)
        .zip(weights)
        .collect::<BTreeMap<u32, f64>>();
    Ok(DistributionEstimate {
        estimator: EstimatorId::Mle,
        sampler: trace.sampler,
        n_steps: trace.n_steps(),
        seed: trace.seed,
        bins,
    })
}

/// MLE for labels that carry no duplication information (for example a
/// category stored on each copy). Per label, EM on that label's multiplicity
/// histogram estimates its copy-count mix `beta`; the observed label share
/// is then divided by the label's probability of being observed at all,
/// `sum_j beta_j (1 - q^j)`, and the results are renormalized.
pub fn estimate_mle_label(
    trace: &SampleTrace,
    store: &ContentStore,
    cfg: &MleConfig,
    labeler: ContentLabeler,
) -> Result<DistributionEstimate> {
    require_nonempty(trace)?;
    require_uni(trace)?;
    let pij = mle_pij(cfg)?;
    let q = 1.0 - cfg.p;

    let counts = copy_multiplicities(trace, store);
    let mut per_label: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    let mut observed_total = 0usize;
    for (cid, &i) in counts.iter().enumerate() {
        if i > 0 {
            per_label
                .entry(labeler.label(store.content(cid as u32)))
                .or_default()
                .push(i);
            observed_total += 1;
        }
    }
    if observed_total == 0 {
        return Err(Error::EmptySample);
    }

    let mut corrected: BTreeMap<u32, f64> = BTreeMap::new();
    let mut normalizer = 0.0;
    for (label, multiplicities) in per_label {
        let share = multiplicities.len() as f64 / observed_total as f64;
        let observations = observed_histogram(multiplicities.into_iter(), cfg.max_copies)?;
        let beta = em_mixture(&observations, &pij, cfg.em_max_iters, cfg.em_tol);
        let seen_probability: f64 = beta
            .iter()
            .enumerate()
            .map(|(idx, b)| b * (1.0 - q.powi(idx as i32 + 1)))
            .sum();
        let value = share / seen_probability;
        corrected.insert(label, value);
        normalizer += value;
    }

    let mut bins = zeroed_bins(store.labels(labeler));
    for (label, value) in corrected {
        bins.insert(label, value / normalizer);
    }
    Ok(DistributionEstimate {
        estimator: EstimatorId::Mle,
        sampler: trace.sampler,
        n_steps: trace.n_steps(),
        seed: trace.seed,
        bins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::{Content, StoreMeta};
    use crate::graph::VertexId;
    use crate::samplers::Step;

    #[test]
    fn kernel_matches_closed_form_at_half() {
        let pij = mle_pij(&MleConfig::new(0.5, 2)).unwrap();
        assert!((pij.prob(1, 1) - 1.0).abs() < 1e-15);
        assert!((pij.prob(1, 2) - 2.0 / 3.0).abs() < 1e-15);
        assert!((pij.prob(2, 2) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn kernel_columns_sum_to_one() {
        for p in [0.01, 0.3, 0.5, 0.97] {
            let pij = mle_pij(&MleConfig::new(p, 60)).unwrap();
            for j in 1..=60 {
                assert!(
                    (pij.column_sum(j) - 1.0).abs() < 1e-12,
                    "p={p} column {j} sums to {}",
                    pij.column_sum(j)
                );
            }
        }
    }

    #[test]
    fn degenerate_p_is_rejected() {
        assert!(mle_pij(&MleConfig::new(0.0, 3)).is_err());
        assert!(mle_pij(&MleConfig::new(1.0, 3)).is_err());
    }

    #[test]
    fn em_recovers_the_mixture_it_was_fed() {
        // Histogram set to the exact mixture density of omega = (0.7, 0.3):
        // EM must sit at (0.7, 0.3), the global maximizer.
        let cfg = MleConfig::new(0.5, 2);
        let pij = mle_pij(&cfg).unwrap();
        let omega = [0.7, 0.3];
        let observations: Vec<(usize, f64)> = (1..=2)
            .map(|i| {
                let mass: f64 = (i..=2).map(|j| omega[j - 1] * pij.prob(i, j)).sum();
                (i, 1000.0 * mass)
            })
            .collect();
        let fitted = em_mixture(&observations, &pij, 10_000, 1e-12);
        assert!((fitted[0] - 0.7).abs() < 1e-6, "fitted {fitted:?}");
        assert!((fitted[1] - 0.3).abs() < 1e-6);
    }

    #[test]
    fn em_near_census_recovers_truth() {
        // p close to 1 concentrates P[i,j] at i = j, so the histogram is
        // essentially the truth.
        let cfg = MleConfig::new(0.999, 3);
        let pij = mle_pij(&cfg).unwrap();
        let omega = [0.5, 0.25, 0.25];
        let observations: Vec<(usize, f64)> = (1..=3)
            .map(|i| {
                let mass: f64 = (i..=3).map(|j| omega[j - 1] * pij.prob(i, j)).sum();
                (i, 500.0 * mass)
            })
            .collect();
        let fitted = em_mixture(&observations, &pij, 10_000, 1e-12);
        for (f, o) in fitted.iter().zip(omega) {
            assert!((f - o).abs() < 1e-3, "fitted {fitted:?}");
        }
    }

    fn meta() -> StoreMeta {
        StoreMeta {
            graph_name: "t".into(),
            scheme: "manual".into(),
            seed: 0,
        }
    }

    fn trace_over(vertices: &[u32]) -> SampleTrace {
        SampleTrace {
            sampler: SamplerId::Uni,
            seed: 0,
            steps: vertices
                .iter()
                .map(|&v| Step {
                    vertex: VertexId(v),
                    weight_hat: 1.0,
                })
                .collect(),
            distinct: vertices.iter().map(|&v| VertexId(v)).collect(),
        }
    }

    #[test]
    fn all_singleton_observations_with_m_one() {
        let store = ContentStore::assemble(
            vec![
                Content {
                    id: 0,
                    label: 1,
                    copy_count: 1,
                    copies: vec![VertexId(0)],
                    special_vertex: VertexId(0),
                },
                Content {
                    id: 1,
                    label: 1,
                    copy_count: 1,
                    copies: vec![VertexId(1)],
                    special_vertex: VertexId(1),
                },
            ],
            4,
            meta(),
        )
        .unwrap();
        let est =
            estimate_mle_copycount(&trace_over(&[0, 1]), &store, &MleConfig::new(0.5, 1)).unwrap();
        assert_eq!(est.probability(1), 1.0);
    }

    #[test]
    fn non_uni_traces_are_rejected() {
        let store = ContentStore::assemble(vec![], 2, meta()).unwrap();
        let mut trace = trace_over(&[0]);
        trace.sampler = SamplerId::Rw;
        assert!(matches!(
            estimate_mle_copycount(&trace, &store, &MleConfig::new(0.5, 2)),
            Err(Error::UnsupportedSampler { .. })
        ));
    }

    #[test]
    fn multiplicity_beyond_m_is_a_config_error() {
        let store = ContentStore::assemble(
            vec![Content {
                id: 0,
                label: 2,
                copy_count: 2,
                copies: vec![VertexId(0), VertexId(1)],
                special_vertex: VertexId(0),
            }],
            2,
            meta(),
        )
        .unwrap();
        assert!(matches!(
            estimate_mle_copycount(&trace_over(&[0, 1]), &store, &MleConfig::new(0.5, 1)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn label_variant_on_singletons_reduces_to_observed_shares() {
        // Both labels single-copy: the per-label correction factors are
        // equal, so the estimate equals the observed shares.
        let store = ContentStore::assemble(
            vec![
                Content {
                    id: 0,
                    label: 10,
                    copy_count: 1,
                    copies: vec![VertexId(0)],
                    special_vertex: VertexId(0),
                },
                Content {
                    id: 1,
                    label: 20,
                    copy_count: 1,
                    copies: vec![VertexId(1)],
                    special_vertex: VertexId(1),
                },
                Content {
                    id: 2,
                    label: 10,
                    copy_count: 1,
                    copies: vec![VertexId(2)],
                    special_vertex: VertexId(2),
                },
            ],
            4,
            meta(),
        )
        .unwrap();
        let est = estimate_mle_label(
            &trace_over(&[0, 1, 2]),
            &store,
            &MleConfig::new(0.75, 1),
            ContentLabeler::Stored,
        )
        .unwrap();
        assert!((est.probability(10) - 2.0 / 3.0).abs() < 1e-12);
        assert!((est.probability(20) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn label_variant_corrects_for_duplication() {
        // Label 7 always has f = 2 ({0,1}), label 9 always f = 1 ({2}).
        // Sampling all three vertices observes one content of each label;
        // correction factors are 1 - q^2 = 0.75 and p = 0.5 at p = 0.5.
        let store = ContentStore::assemble(
            vec![
                Content {
                    id: 0,
                    label: 7,
                    copy_count: 2,
                    copies: vec![VertexId(0), VertexId(1)],
                    special_vertex: VertexId(0),
                },
                Content {
                    id: 1,
                    label: 9,
                    copy_count: 1,
                    copies: vec![VertexId(2)],
                    special_vertex: VertexId(2),
                },
            ],
            4,
            meta(),
        )
        .unwrap();
        let est = estimate_mle_label(
            &trace_over(&[0, 1, 2]),
            &store,
            &MleConfig::new(0.5, 2),
            ContentLabeler::Stored,
        )
        .unwrap();
        // Observed shares are 1/2 each; corrected masses are
        // (1/2)/0.75 = 2/3 and (1/2)/0.5 = 1; normalized: 0.4 and 0.6.
        assert!((est.probability(7) - 0.4).abs() < 1e-6, "{est:?}");
        assert!((est.probability(9) - 0.6).abs() < 1e-6);
    }

    #[test]
    fn unobserved_label_reports_zero() {
        let store = ContentStore::assemble(
            vec![
                Content {
                    id: 0,
                    label: 1,
                    copy_count: 1,
                    copies: vec![VertexId(0)],
                    special_vertex: VertexId(0),
                },
                Content {
                    id: 1,
                    label: 2,
                    copy_count: 1,
                    copies: vec![VertexId(3)],
                    special_vertex: VertexId(3),
                },
            ],
            4,
            meta(),
        )
        .unwrap();
        let est = estimate_mle_label(
            &trace_over(&[0, 1]),
            &store,
            &MleConfig::new(0.5, 1),
            ContentLabeler::Stored,
        )
        .unwrap();
        assert_eq!(est.probability(2), 0.0);
        assert_eq!(est.probability(1), 1.0);
    }
}
