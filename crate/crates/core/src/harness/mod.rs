//! Declarative experiment orchestration.
//!
//! An [`ExperimentConfig`] fully determines one experiment: generate a
//! content store, run `runs` independent sampling runs with seeds
//! `base_seed + 1 ..= base_seed + runs`, estimate per run, and score each
//! label bin by NMSE against the store's true distribution. Runs execute in
//! parallel, but results are reduced in run-index order, so the report is
//! byte-identical regardless of the worker pool size.

mod nmse;

pub use nmse::{compute_nmse, NmseReport, NmseRow, RunSet};

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::content::{
    generate_cds1, generate_cds2, generate_cds3, generate_cds4, ContentLabeler, ContentStore,
    ParetoConfig, SchemeId,
};
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_dce, estimate_mle_copycount, estimate_sce, estimate_vertex_wce, estimate_wce,
    DistributionEstimate, EstimatorId, MleConfig, VertexLabeler,
};
use crate::graph::{load_edge_list, Graph};
use crate::samplers::{sample, SamplerConfig, SamplerId, StopRule};

fn default_n_content() -> usize {
    10_000
}
fn default_alpha() -> f64 {
    1.0
}
fn default_max_copies() -> u32 {
    100
}
fn default_p_s() -> f64 {
    0.01
}
fn default_budget_fraction() -> f64 {
    0.01
}
fn default_walkers() -> usize {
    1000
}
fn default_runs() -> usize {
    1000
}
fn default_base_seed() -> u64 {
    1
}

/// Full declarative description of one experiment. The file format is flat
/// TOML `key = value` pairs mirroring these field names; command-line flags
/// override file values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph_path: String,
    #[serde(default)]
    pub directed: bool,
    /// Restrict the whole experiment (placement, sampling, truth) to the
    /// largest connected component.
    #[serde(default)]
    pub restrict_to_lcc: bool,
    pub scheme: SchemeId,
    #[serde(default = "default_n_content")]
    pub n_content: usize,
    /// Pareto shape for CDS I/II.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// `W`, the Pareto truncation for CDS I/II.
    #[serde(default = "default_max_copies")]
    pub max_copies: u32,
    /// Cascade success probability for CDS III/IV.
    #[serde(default = "default_p_s")]
    pub p_s: f64,
    pub sampler: SamplerId,
    pub estimator: EstimatorId,
    /// Distinct-vertex budget as a fraction of `|V|`.
    #[serde(default = "default_budget_fraction")]
    pub budget_fraction: f64,
    /// `T`, the number of FS walkers.
    #[serde(default = "default_walkers")]
    pub walkers: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_base_seed")]
    pub base_seed: u64,
    pub output_path: String,
    #[serde(default)]
    pub burn_in: usize,
    /// Sensitivity knob: draw a fresh store for every run instead of fixing
    /// one store per experiment.
    #[serde(default)]
    pub regen_store_per_run: bool,
    /// Override for the MLE's maximum copy count `M`; defaults to `W` for
    /// CDS I/II and to the realized maximum for CDS III/IV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mle_max_copies: Option<u32>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("bad experiment config: {e}")))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Static checks that need no graph: ranges and sampler/estimator
    /// compatibility. Anything wrong surfaces before any run starts.
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if !(self.budget_fraction > 0.0 && self.budget_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "budget_fraction must lie in (0, 1], got {}",
                self.budget_fraction
            )));
        }
        if self.n_content == 0 {
            return Err(Error::Config("n_content must be at least 1".into()));
        }
        if self.walkers == 0 {
            return Err(Error::Config("walkers must be at least 1".into()));
        }
        if matches!(self.scheme, SchemeId::Cds1 | SchemeId::Cds2) {
            ParetoConfig::new(self.alpha, self.max_copies)?;
        }
        if matches!(self.scheme, SchemeId::Cds3 | SchemeId::Cds4)
            && !(0.0..=1.0).contains(&self.p_s)
        {
            return Err(Error::Config(format!(
                "p_s must lie in [0, 1], got {}",
                self.p_s
            )));
        }
        if self.scheme == SchemeId::Cds4 && !self.directed {
            return Err(Error::Config("cds4 requires directed = true".into()));
        }
        if self.estimator == EstimatorId::Mle && self.sampler != SamplerId::Uni {
            return Err(Error::UnsupportedSampler {
                estimator: self.estimator.as_str(),
                sampler: self.sampler.as_str(),
            });
        }
        if self.estimator == EstimatorId::VertexWce && !self.directed {
            return Err(Error::Config(
                "the vwce estimator requires directed = true".into(),
            ));
        }
        Ok(())
    }

    fn graph_name(&self) -> String {
        Path::new(&self.graph_path)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.graph_path.clone())
    }
}

/// Distinct-vertex budget for a graph of `n` vertices.
pub fn resolve_budget(budget_fraction: f64, n: usize) -> usize {
    ((budget_fraction * n as f64).round() as usize).clamp(1, n)
}

/// Loads the graph, runs the experiment and writes the report to
/// `output_path`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<NmseReport> {
    cfg.validate()?;
    let graph = load_edge_list(&cfg.graph_path, cfg.directed)?;
    let report = run_experiment_on(cfg, &graph)?;
    report.write_to(&cfg.output_path)?;
    Ok(report)
}

/// Runs the experiment against an already-loaded graph. Applies the LCC
/// restriction itself; the report is not written to disk.
pub fn run_experiment_on(cfg: &ExperimentConfig, graph: &Graph) -> Result<NmseReport> {
    let started = Instant::now();
    cfg.validate()?;
    let restricted;
    let graph = if cfg.restrict_to_lcc {
        restricted = graph.lcc_subgraph()?;
        &restricted
    } else {
        graph
    };

    let shared_store = if cfg.regen_store_per_run || cfg.estimator == EstimatorId::VertexWce {
        None
    } else {
        Some(generate_store(cfg, graph, cfg.base_seed)?)
    };

    let run_set = collect_runs(cfg, graph, shared_store.as_ref())?;
    let (rows, spurious) = compute_nmse(&run_set);
    Ok(NmseReport {
        rows,
        spurious,
        runs: cfg.runs,
        config_echo: cfg.to_toml_string(),
        wall: started.elapsed(),
    })
}

fn generate_store(cfg: &ExperimentConfig, graph: &Graph, seed: u64) -> Result<ContentStore> {
    let store = match cfg.scheme {
        SchemeId::Cds1 => {
            let pareto = ParetoConfig::new(cfg.alpha, cfg.max_copies)?;
            generate_cds1(graph, cfg.n_content, &pareto, seed)?
        }
        SchemeId::Cds2 => {
            let pareto = ParetoConfig::new(cfg.alpha, cfg.max_copies)?;
            generate_cds2(graph, cfg.n_content, &pareto, seed)?
        }
        SchemeId::Cds3 => generate_cds3(graph, cfg.n_content, cfg.p_s, seed)?,
        SchemeId::Cds4 => generate_cds4(graph, cfg.n_content, cfg.p_s, seed)?,
    };
    Ok(store.with_graph_name(cfg.graph_name()))
}

/// Seed layout: the shared store uses `base_seed`; run `r` samples with
/// `base_seed + 1 + r`; regenerated stores use `base_seed + 1 + runs + r`,
/// keeping the two streams disjoint.
fn collect_runs(
    cfg: &ExperimentConfig,
    graph: &Graph,
    shared_store: Option<&ContentStore>,
) -> Result<RunSet> {
    let budget = resolve_budget(cfg.budget_fraction, graph.num_vertices());
    let sampler_cfg = SamplerConfig {
        stop: StopRule::DistinctBudget(budget),
        walkers: cfg.walkers,
        burn_in: cfg.burn_in,
        ..SamplerConfig::with_budget(budget)
    };

    let outcomes: Vec<(BTreeMap<u32, f64>, Option<BTreeMap<u32, f64>>)> = (0..cfg.runs)
        .into_par_iter()
        .map(|r| -> Result<_> {
            let trace_seed = cfg.base_seed + 1 + r as u64;
            let trace = sample(graph, cfg.sampler, &sampler_cfg, trace_seed)?;
            let (bins, truth) = match (shared_store, cfg.estimator) {
                (_, EstimatorId::VertexWce) => {
                    let est = estimate_vertex_wce(&trace, graph, &VertexLabeler::OutDegree)?;
                    (est.bins, None)
                }
                (Some(store), _) => {
                    let est = estimate_one(cfg, graph, store, &trace)?;
                    (est.bins, None)
                }
                (None, _) => {
                    let store_seed = cfg.base_seed + 1 + cfg.runs as u64 + r as u64;
                    let store = generate_store(cfg, graph, store_seed)?;
                    let est = estimate_one(cfg, graph, &store, &trace)?;
                    let truth = store.true_distribution(ContentLabeler::CopyCount);
                    (est.bins, Some(truth))
                }
            };
            Ok((bins, truth))
        })
        .collect::<Result<_>>()?;

    let mut estimates = Vec::with_capacity(cfg.runs);
    let mut truths = Vec::new();
    for (bins, truth) in outcomes {
        estimates.push(bins);
        if let Some(t) = truth {
            truths.push(t);
        }
    }
    if truths.is_empty() {
        truths.push(match (shared_store, cfg.estimator) {
            (_, EstimatorId::VertexWce) => VertexLabeler::OutDegree.census(graph)?,
            (Some(store), _) => store.true_distribution(ContentLabeler::CopyCount),
            (None, _) => unreachable!("regen mode collects per-run truths"),
        });
    }
    Ok(RunSet { estimates, truths })
}

fn estimate_one(
    cfg: &ExperimentConfig,
    graph: &Graph,
    store: &ContentStore,
    trace: &crate::samplers::SampleTrace,
) -> Result<DistributionEstimate> {
    match cfg.estimator {
        EstimatorId::Dce => estimate_dce(trace, store, ContentLabeler::CopyCount),
        EstimatorId::Sce => estimate_sce(trace, store, ContentLabeler::CopyCount),
        EstimatorId::Wce => estimate_wce(trace, store, ContentLabeler::CopyCount),
        EstimatorId::Mle => {
            let mle = mle_config_for(cfg, graph, store, trace)?;
            estimate_mle_copycount(trace, store, &mle)
        }
        EstimatorId::VertexWce => estimate_vertex_wce(trace, graph, &VertexLabeler::OutDegree),
    }
}

/// `p` is the realized distinct-vertex fraction; `M` defaults to the
/// configured `W` for Pareto schemes and to the store's realized maximum for
/// cascades, where no a-priori bound exists.
fn mle_config_for(
    cfg: &ExperimentConfig,
    graph: &Graph,
    store: &ContentStore,
    trace: &crate::samplers::SampleTrace,
) -> Result<MleConfig> {
    let n = graph.num_vertices();
    let distinct = trace.distinct_count();
    if distinct >= n {
        return Err(Error::Config(
            "MLE needs a budget strictly below |V| (p = n/|V| must stay below 1)".into(),
        ));
    }
    let p = distinct as f64 / n as f64;
    let m = cfg.mle_max_copies.unwrap_or(match cfg.scheme {
        SchemeId::Cds1 | SchemeId::Cds2 => cfg.max_copies,
        SchemeId::Cds3 | SchemeId::Cds4 => store.max_copy_count().max(1),
    });
    Ok(MleConfig::new(p, m as usize))
}

/// Joined per-bin NMSE across configurations that differ only in sampler
/// and estimator; everything that determines the store or the run layout
/// must match, so every column is scored against the same truth.
#[derive(Clone, Debug)]
pub struct ComparisonTable {
    /// Column names, `SAMPLER_ESTIMATOR`.
    pub pairs: Vec<String>,
    pub rows: Vec<ComparisonRow>,
    pub runs: usize,
}

#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub label: u32,
    pub true_omega: f64,
    /// NMSE per pair, aligned with `ComparisonTable::pairs`.
    pub nmse: Vec<f64>,
}

impl ComparisonTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,true_omega");
        for pair in &self.pairs {
            out.push_str(",nmse_");
            out.push_str(pair);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{},{}", row.label, row.true_omega));
            for v in &row.nmse {
                if v.is_nan() {
                    out.push_str(",");
                } else {
                    out.push_str(&format!(",{v}"));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Runs every configuration against one shared store and one trace per
/// (sampler, run) pair, then joins the per-bin NMSE columns.
pub fn compare_estimators(configs: &[ExperimentConfig]) -> Result<ComparisonTable> {
    let base = configs
        .first()
        .ok_or_else(|| Error::Config("compare needs at least one configuration".into()))?;
    for cfg in configs {
        cfg.validate()?;
        if !same_store_and_runs(base, cfg) {
            return Err(Error::Config(
                "compared configurations may differ only in sampler and estimator".into(),
            ));
        }
    }
    let vwce_count = configs
        .iter()
        .filter(|c| c.estimator == EstimatorId::VertexWce)
        .count();
    if vwce_count != 0 && vwce_count != configs.len() {
        return Err(Error::Config(
            "vwce estimates vertex labels and cannot be joined with content estimators".into(),
        ));
    }

    let graph = load_edge_list(&base.graph_path, base.directed)?;
    compare_estimators_on(configs, &graph)
}

/// [`compare_estimators`] against an already-loaded graph.
pub fn compare_estimators_on(
    configs: &[ExperimentConfig],
    graph: &Graph,
) -> Result<ComparisonTable> {
    let base = &configs[0];
    let restricted;
    let graph = if base.restrict_to_lcc {
        restricted = graph.lcc_subgraph()?;
        &restricted
    } else {
        graph
    };

    let mut columns = Vec::with_capacity(configs.len());
    for cfg in configs {
        let run_set = if cfg.estimator == EstimatorId::VertexWce || cfg.regen_store_per_run {
            collect_runs(cfg, graph, None)?
        } else {
            let store = generate_store(cfg, graph, cfg.base_seed)?;
            collect_runs(cfg, graph, Some(&store))?
        };
        let (rows, _) = compute_nmse(&run_set);
        columns.push(rows);
    }

    // Join on the union of scored labels; a pair missing a label gets NaN
    // (rendered as an empty cell).
    let mut labels: Vec<u32> = columns
        .iter()
        .flat_map(|rows| rows.iter().map(|r| r.label))
        .collect();
    labels.sort_unstable();
    labels.dedup();

    let mut rows = Vec::with_capacity(labels.len());
    for label in labels {
        let true_omega = columns
            .iter()
            .find_map(|rows| rows.iter().find(|r| r.label == label))
            .map(|r| r.true_omega)
            .unwrap_or(0.0);
        let nmse = columns
            .iter()
            .map(|rows| {
                rows.iter()
                    .find(|r| r.label == label)
                    .map(|r| r.nmse)
                    .unwrap_or(f64::NAN)
            })
            .collect();
        rows.push(ComparisonRow {
            label,
            true_omega,
            nmse,
        });
    }
    Ok(ComparisonTable {
        pairs: configs
            .iter()
            .map(|c| format!("{}_{}", c.sampler, c.estimator))
            .collect(),
        rows,
        runs: base.runs,
    })
}

fn same_store_and_runs(a: &ExperimentConfig, b: &ExperimentConfig) -> bool {
    let strip = |c: &ExperimentConfig| {
        let mut c = c.clone();
        c.sampler = SamplerId::Uni;
        c.estimator = EstimatorId::Dce;
        c.output_path = String::new();
        c.mle_max_copies = None;
        c
    };
    strip(a) == strip(b)
}
