//! Command-line driver for graph content sampling experiments.
//!
//! Exit codes: 0 on success, 1 on runtime errors, 2 on usage errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use replisample::content::{
    generate_cds1, generate_cds2, generate_cds3, generate_cds4, load_store, save_store,
    ContentLabeler, ContentStore, ParetoConfig, SchemeId,
};
use replisample::estimators::{
    estimate_dce, estimate_mle_copycount, estimate_mle_label, estimate_sce, estimate_vertex_wce,
    estimate_wce, DistributionEstimate, EstimatorId, MleConfig, VertexLabeler,
};
use replisample::graph::{load_edge_list, Graph};
use replisample::harness::{
    compare_estimators, resolve_budget, run_experiment, ExperimentConfig,
};
use replisample::samplers::{sample, SamplerConfig, SamplerId, StopRule};

#[derive(Parser)]
#[command(name = "replisample", version, about = "Sample and estimate content replicated over graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print vertex, edge and largest-connected-component counts.
    GraphStats {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Generate synthetic content and write the store file.
    GenContent {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        scheme: SchemeId,
        #[arg(long, default_value_t = 10_000)]
        n_content: usize,
        /// Pareto shape (cds1/cds2).
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Pareto truncation W (cds1/cds2).
        #[arg(long, default_value_t = 100)]
        max_copies: u32,
        /// Cascade success probability (cds3/cds4).
        #[arg(long, default_value_t = 0.01)]
        spread_prob: f64,
        /// Replace copy-count labels with uniform categorical labels from
        /// 0..K, independent of the copy counts.
        #[arg(long, value_name = "K")]
        categorical_labels: Option<u32>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one sampler and dump the trace as CSV.
    Sample {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        sampler: SamplerId,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 1000)]
        walkers: usize,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample once and estimate the content label distribution.
    Estimate {
        #[command(flatten)]
        graph: GraphArgs,
        /// Content store file (not needed for vwce).
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long)]
        sampler: SamplerId,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 1000)]
        walkers: usize,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        #[arg(long)]
        estimator: EstimatorId,
        /// Label under study: the copy count, or the label stored on each
        /// content. With --estimator mle, "stored" selects the
        /// duplication-insensitive variant.
        #[arg(long, default_value = "copy-count")]
        labeler: LabelerArg,
        /// Vertex label for vwce.
        #[arg(long, default_value = "outdeg")]
        vertex_label: VertexLabelArg,
        /// Override for the MLE's maximum copy count M.
        #[arg(long)]
        mle_max_copies: Option<u32>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a multi-run NMSE experiment described by a config file.
    Experiment {
        /// TOML config; any flag below overrides the file value.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: ExperimentOverrides,
        /// Worker threads for the run pool (default: all cores). Never
        /// changes the output.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Joined per-bin NMSE table across sampler/estimator pairs.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated SAMPLER_ESTIMATOR pairs, e.g. UNI_WCE,UNI_SCE.
        #[arg(long, value_delimiter = ',', required = true)]
        pairs: Vec<String>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Args)]
struct GraphArgs {
    /// Edge-list file: one `u v` pair per line, `#` comments.
    #[arg(long)]
    graph: PathBuf,
    /// Treat edges as directed.
    #[arg(long)]
    directed: bool,
    /// Work on the largest connected component only.
    #[arg(long)]
    restrict_to_lcc: bool,
}

impl GraphArgs {
    fn load(&self) -> Result<Graph> {
        let g = load_edge_list(&self.graph, self.directed)
            .with_context(|| format!("loading {}", self.graph.display()))?;
        if self.restrict_to_lcc {
            Ok(g.lcc_subgraph()?)
        } else {
            Ok(g)
        }
    }

    fn name(&self) -> String {
        self.graph
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.graph.display().to_string())
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct BudgetArgs {
    /// Distinct-vertex budget.
    #[arg(long)]
    budget: Option<usize>,
    /// Distinct-vertex budget as a fraction of |V|.
    #[arg(long)]
    budget_fraction: Option<f64>,
    /// Fixed step count instead of a distinct-vertex budget.
    #[arg(long)]
    steps: Option<usize>,
}

impl BudgetArgs {
    fn stop_rule(&self, num_vertices: usize) -> StopRule {
        if let Some(b) = self.budget {
            StopRule::DistinctBudget(b)
        } else if let Some(f) = self.budget_fraction {
            StopRule::DistinctBudget(resolve_budget(f, num_vertices))
        } else {
            StopRule::TotalSteps(self.steps.expect("clap enforces one budget flag"))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum LabelerArg {
    CopyCount,
    Stored,
}

impl From<LabelerArg> for ContentLabeler {
    fn from(arg: LabelerArg) -> Self {
        match arg {
            LabelerArg::CopyCount => ContentLabeler::CopyCount,
            LabelerArg::Stored => ContentLabeler::Stored,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum VertexLabelArg {
    Outdeg,
    Indeg,
}

impl From<VertexLabelArg> for VertexLabeler {
    fn from(arg: VertexLabelArg) -> Self {
        match arg {
            VertexLabelArg::Outdeg => VertexLabeler::OutDegree,
            VertexLabelArg::Indeg => VertexLabeler::InDegree,
        }
    }
}

/// Flag-level overrides of [`ExperimentConfig`] fields.
#[derive(Args)]
struct ExperimentOverrides {
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    restrict_to_lcc: bool,
    #[arg(long)]
    scheme: Option<SchemeId>,
    #[arg(long)]
    n_content: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    max_copies: Option<u32>,
    #[arg(long)]
    spread_prob: Option<f64>,
    #[arg(long)]
    sampler: Option<SamplerId>,
    #[arg(long)]
    estimator: Option<EstimatorId>,
    #[arg(long)]
    budget_fraction: Option<f64>,
    #[arg(long)]
    walkers: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    base_seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    regen_store_per_run: bool,
    #[arg(long)]
    mle_max_copies: Option<u32>,
}

impl ExperimentOverrides {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(g) = &self.graph {
            cfg.graph_path = g.display().to_string();
        }
        if self.directed {
            cfg.directed = true;
        }
        if self.restrict_to_lcc {
            cfg.restrict_to_lcc = true;
        }
        if let Some(s) = self.scheme {
            cfg.scheme = s;
        }
        if let Some(n) = self.n_content {
            cfg.n_content = n;
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(w) = self.max_copies {
            cfg.max_copies = w;
        }
        if let Some(p) = self.spread_prob {
            cfg.p_s = p;
        }
        if let Some(s) = self.sampler {
            cfg.sampler = s;
        }
        if let Some(e) = self.estimator {
            cfg.estimator = e;
        }
        if let Some(b) = self.budget_fraction {
            cfg.budget_fraction = b;
        }
        if let Some(t) = self.walkers {
            cfg.walkers = t;
        }
        if let Some(r) = self.runs {
            cfg.runs = r;
        }
        if let Some(s) = self.base_seed {
            cfg.base_seed = s;
        }
        if let Some(o) = &self.out {
            cfg.output_path = o.display().to_string();
        }
        if let Some(b) = self.burn_in {
            cfg.burn_in = b;
        }
        if self.regen_store_per_run {
            cfg.regen_store_per_run = true;
        }
        if let Some(m) = self.mle_max_copies {
            cfg.mle_max_copies = Some(m);
        }
    }

    /// Builds a config from flags alone when no file is given. The
    /// mandatory fields must then all be present as flags.
    fn build_config(&self) -> Result<ExperimentConfig> {
        let graph = self
            .graph
            .as_ref()
            .context("--graph is required when no --config file is given")?;
        let scheme = self
            .scheme
            .context("--scheme is required when no --config file is given")?;
        let sampler = self
            .sampler
            .context("--sampler is required when no --config file is given")?;
        let estimator = self
            .estimator
            .context("--estimator is required when no --config file is given")?;
        let out = self
            .out
            .as_ref()
            .context("--out is required when no --config file is given")?;
        let template = format!(
            "graph_path = {:?}\nscheme = {:?}\nsampler = {:?}\nestimator = {:?}\noutput_path = {:?}\n",
            graph.display().to_string(),
            scheme.to_string(),
            sampler.to_string().to_lowercase(),
            estimator.to_string().to_lowercase(),
            out.display().to_string(),
        );
        let mut cfg = ExperimentConfig::from_toml_str(&template)?;
        self.apply(&mut cfg);
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::GraphStats { graph } => graph_stats(&graph),
        Command::GenContent {
            graph,
            scheme,
            n_content,
            alpha,
            max_copies,
            spread_prob,
            categorical_labels,
            seed,
            out,
        } => gen_content(
            &graph,
            scheme,
            n_content,
            alpha,
            max_copies,
            spread_prob,
            categorical_labels,
            seed,
            &out,
        ),
        Command::Sample {
            graph,
            sampler,
            budget,
            walkers,
            burn_in,
            seed,
            out,
        } => run_sample(&graph, sampler, &budget, walkers, burn_in, seed, out.as_deref()),
        Command::Estimate {
            graph,
            store,
            sampler,
            budget,
            walkers,
            burn_in,
            estimator,
            labeler,
            vertex_label,
            mle_max_copies,
            seed,
            out,
        } => run_estimate(
            &graph,
            store.as_deref(),
            sampler,
            &budget,
            walkers,
            burn_in,
            estimator,
            labeler,
            vertex_label,
            mle_max_copies,
            seed,
            out.as_deref(),
        ),
        Command::Experiment {
            config,
            overrides,
            jobs,
        } => run_experiment_cmd(config.as_deref(), &overrides, jobs),
        Command::Compare {
            config,
            pairs,
            out,
            jobs,
        } => run_compare(&config, &pairs, out.as_deref(), jobs),
    }
}

fn configure_jobs(jobs: Option<usize>) -> Result<()> {
    if let Some(n) = jobs {
        if n == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("initializing the worker pool")?;
    }
    Ok(())
}

fn graph_stats(args: &GraphArgs) -> Result<()> {
    // Always load the full graph; the LCC lines report its restriction.
    let g = load_edge_list(&args.graph, args.directed)
        .with_context(|| format!("loading {}", args.graph.display()))?;
    let lcc = g.lcc_subgraph()?;
    println!("vertices: {}", g.num_vertices());
    println!("edges: {}", g.undirected_edge_count());
    if let Some(dv) = g.directed_view() {
        println!("directed-edges: {}", dv.edge_count());
    }
    println!("vertices (LCC): {}", lcc.num_vertices());
    println!("edges (LCC): {}", lcc.undirected_edge_count());
    if let Some(dv) = lcc.directed_view() {
        println!("directed-edges (LCC): {}", dv.edge_count());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn gen_content(
    args: &GraphArgs,
    scheme: SchemeId,
    n_content: usize,
    alpha: f64,
    max_copies: u32,
    spread_prob: f64,
    categorical_labels: Option<u32>,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let g = args.load()?;
    let mut store = match scheme {
        SchemeId::Cds1 => generate_cds1(&g, n_content, &ParetoConfig::new(alpha, max_copies)?, seed)?,
        SchemeId::Cds2 => generate_cds2(&g, n_content, &ParetoConfig::new(alpha, max_copies)?, seed)?,
        SchemeId::Cds3 => generate_cds3(&g, n_content, spread_prob, seed)?,
        SchemeId::Cds4 => generate_cds4(&g, n_content, spread_prob, seed)?,
    }
    .with_graph_name(args.name());
    if let Some(k) = categorical_labels {
        store = store.with_categorical_labels(k, seed.wrapping_add(1));
    }
    save_store(&store, out)?;
    println!(
        "wrote {} contents (max copies {}) to {}",
        store.num_contents(),
        store.max_copy_count(),
        out.display()
    );
    Ok(())
}

fn run_sample(
    args: &GraphArgs,
    sampler: SamplerId,
    budget: &BudgetArgs,
    walkers: usize,
    burn_in: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<()> {
    let g = args.load()?;
    let cfg = SamplerConfig {
        stop: budget.stop_rule(g.num_vertices()),
        walkers,
        burn_in,
        ..SamplerConfig::with_budget(1)
    };
    let trace = sample(&g, sampler, &cfg, seed)?;
    match out {
        Some(path) => {
            let mut buf = Vec::new();
            trace.write_csv(&mut buf)?;
            fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
            println!(
                "{} steps, {} distinct vertices -> {}",
                trace.n_steps(),
                trace.distinct_count(),
                path.display()
            );
        }
        None => {
            let stdout = std::io::stdout();
            trace.write_csv(stdout.lock())?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_estimate(
    args: &GraphArgs,
    store_path: Option<&Path>,
    sampler: SamplerId,
    budget: &BudgetArgs,
    walkers: usize,
    burn_in: usize,
    estimator: EstimatorId,
    labeler: LabelerArg,
    vertex_label: VertexLabelArg,
    mle_max_copies: Option<u32>,
    seed: u64,
    out: Option<&Path>,
) -> Result<()> {
    let g = args.load()?;
    let cfg = SamplerConfig {
        stop: budget.stop_rule(g.num_vertices()),
        walkers,
        burn_in,
        ..SamplerConfig::with_budget(1)
    };
    let trace = sample(&g, sampler, &cfg, seed)?;

    let load = |path: Option<&Path>| -> Result<ContentStore> {
        let path = path.context("--store is required for content estimators")?;
        Ok(load_store(path)?)
    };
    let content_labeler: ContentLabeler = labeler.into();
    let estimate: DistributionEstimate = match estimator {
        EstimatorId::Dce => estimate_dce(&trace, &load(store_path)?, content_labeler)?,
        EstimatorId::Sce => estimate_sce(&trace, &load(store_path)?, content_labeler)?,
        EstimatorId::Wce => estimate_wce(&trace, &load(store_path)?, content_labeler)?,
        EstimatorId::Mle => {
            let store = load(store_path)?;
            let n = g.num_vertices();
            if trace.distinct_count() >= n {
                bail!("MLE needs a budget strictly below |V|");
            }
            let p = trace.distinct_count() as f64 / n as f64;
            let m = mle_max_copies.unwrap_or_else(|| store.max_copy_count().max(1));
            let mle = MleConfig::new(p, m as usize);
            match labeler {
                LabelerArg::CopyCount => estimate_mle_copycount(&trace, &store, &mle)?,
                LabelerArg::Stored => {
                    estimate_mle_label(&trace, &store, &mle, ContentLabeler::Stored)?
                }
            }
        }
        EstimatorId::VertexWce => estimate_vertex_wce(&trace, &g, &vertex_label.into())?,
    };

    match out {
        Some(path) => {
            let mut buf = Vec::new();
            estimate.write_csv(&mut buf)?;
            fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
            println!(
                "{} over {} steps -> {}",
                estimate.estimator,
                estimate.n_steps,
                path.display()
            );
        }
        None => {
            let stdout = std::io::stdout();
            estimate.write_csv(stdout.lock())?;
        }
    }
    Ok(())
}

fn run_experiment_cmd(
    config: Option<&Path>,
    overrides: &ExperimentOverrides,
    jobs: Option<usize>,
) -> Result<()> {
    configure_jobs(jobs)?;
    let cfg = match config {
        Some(path) => {
            let mut cfg = ExperimentConfig::from_file(path)
                .with_context(|| format!("reading {}", path.display()))?;
            overrides.apply(&mut cfg);
            cfg
        }
        None => overrides.build_config()?,
    };
    let report = run_experiment(&cfg)?;
    println!(
        "wrote {} rows ({} runs) to {} in {:.2?}",
        report.rows.len(),
        report.runs,
        cfg.output_path,
        report.wall
    );
    Ok(())
}

fn run_compare(config: &Path, pairs: &[String], out: Option<&Path>, jobs: Option<usize>) -> Result<()> {
    configure_jobs(jobs)?;
    let base = ExperimentConfig::from_file(config)
        .with_context(|| format!("reading {}", config.display()))?;
    let mut configs = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let (sampler, estimator) = pair
            .split_once('_')
            .with_context(|| format!("pair {pair:?} is not SAMPLER_ESTIMATOR"))?;
        let mut cfg = base.clone();
        cfg.sampler = sampler
            .parse()
            .map_err(|e: String| anyhow::anyhow!(e))
            .with_context(|| format!("in pair {pair:?}"))?;
        cfg.estimator = estimator
            .parse()
            .map_err(|e: String| anyhow::anyhow!(e))
            .with_context(|| format!("in pair {pair:?}"))?;
        configs.push(cfg);
    }
    let table = compare_estimators(&configs)?;
    match out {
        Some(path) => {
            fs::write(path, table.to_csv())
                .with_context(|| format!("writing {}", path.display()))?;
            println!(
                "wrote {} rows x {} pairs to {}",
                table.rows.len(),
                table.pairs.len(),
                path.display()
            );
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(table.to_csv().as_bytes())?;
        }
    }
    Ok(())
}
