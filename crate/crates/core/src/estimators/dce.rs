//! Distinct content estimator.

use super::{require_nonempty, zeroed_bins, DistributionEstimate, EstimatorId};
use crate::content::{ContentLabeler, ContentStore};
use crate::error::{Error, Result};
use crate::samplers::SampleTrace;

/// Estimates the label distribution as the label frequencies within the set
/// of distinct collected contents. Collection probability grows with a
/// content's copy count, so heavily replicated labels are overrepresented;
/// the estimator is kept as the naive baseline.
pub fn estimate_dce(
    trace: &SampleTrace,
    store: &ContentStore,
    labeler: ContentLabeler,
) -> Result<DistributionEstimate> {
    require_nonempty(trace)?;
    let mut collected = vec![false; store.num_contents()];
    // Revisits never add content, so the distinct vertex set suffices.
    for &v in &trace.distinct {
        for &cid in store.copies_at(v) {
            collected[cid as usize] = true;
        }
    }
    let mut bins = zeroed_bins(store.labels(labeler));
    let mut total = 0usize;
    for (cid, seen) in collected.iter().enumerate() {
        if *seen {
            total += 1;
            *bins
                .get_mut(&labeler.label(store.content(cid as u32)))
                .expect("store labels cover every content") += 1.0;
        }
    }
    if total == 0 {
        return Err(Error::EmptySample);
    }
    for value in bins.values_mut() {
        *value /= total as f64;
    }
    Ok(DistributionEstimate {
        estimator: EstimatorId::Dce,
        sampler: trace.sampler,
        n_steps: trace.n_steps(),
        seed: trace.seed,
        bins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::{Content, ContentStore, StoreMeta};
    use crate::graph::VertexId;
    use crate::samplers::{SampleTrace, SamplerId, Step};

    fn store_a2_b1() -> ContentStore {
        // Content A (f = 2 on {0, 1}), content B (f = 1 on {2}).
        ContentStore::assemble(
            vec![
                Content {
                    id: 0,
                    label: 2,
                    copy_count: 2,
                    copies: vec![VertexId(0), VertexId(1)],
                    special_vertex: VertexId(0),
                },
                Content {
                    id: 1,
                    label: 1,
                    copy_count: 1,
                    copies: vec![VertexId(2)],
                    special_vertex: VertexId(2),
                },
            ],
            3,
            StoreMeta {
                graph_name: "t".into(),
                scheme: "manual".into(),
                seed: 0,
            },
        )
        .unwrap()
    }

    fn single_step_trace(v: u32) -> SampleTrace {
        SampleTrace {
            sampler: SamplerId::Uni,
            seed: 0,
            steps: vec![Step {
                vertex: VertexId(v),
                weight_hat: 1.0,
            }],
            distinct: vec![VertexId(v)],
        }
    }

    #[test]
    fn single_step_expectation_overweights_replicated_content() {
        // Exhaustive over the three equally likely single-vertex samples:
        // P(A collected) = 2/3, P(B) = 1/3, so E[omega_hat_A] = 2/3 > 1/2.
        let store = store_a2_b1();
        let mut expectation_a = 0.0;
        for v in 0..3 {
            let est = estimate_dce(&single_step_trace(v), &store, ContentLabeler::CopyCount)
                .unwrap();
            expectation_a += est.probability(2) / 3.0;
        }
        assert!((expectation_a - 2.0 / 3.0).abs() < 1e-12);
        assert!(expectation_a > 0.5);
    }

    #[test]
    fn full_census_of_singletons_is_exact() {
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
            ],
            2,
            StoreMeta {
                graph_name: "t".into(),
                scheme: "manual".into(),
                seed: 0,
            },
        )
        .unwrap();
        let trace = SampleTrace {
            sampler: SamplerId::Uni,
            seed: 0,
            steps: (0..2)
                .map(|v| Step {
                    vertex: VertexId(v),
                    weight_hat: 1.0,
                })
                .collect(),
            distinct: vec![VertexId(0), VertexId(1)],
        };
        let est = estimate_dce(&trace, &store, ContentLabeler::Stored).unwrap();
        assert_eq!(est.probability(10), 0.5);
        assert_eq!(est.probability(20), 0.5);
    }

    #[test]
    fn content_free_sample_is_empty() {
        // Vertex 3 exists in the graph but hosts nothing.
        let mut store = store_a2_b1();
        store = ContentStore::assemble(store.contents().to_vec(), 4, store.meta().clone())
            .unwrap();
        let err = estimate_dce(&single_step_trace(3), &store, ContentLabeler::CopyCount)
            .unwrap_err();
        assert!(matches!(err, Error::EmptySample));
    }
}
