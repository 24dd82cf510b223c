//! Command-line interface for dependency-network role discovery.
//!
//! Subcommands cover each pipeline stage on its own — `ingest`, `sample`,
//! `closure`, `structural`, `regular`, `cluster`, `report` — plus `run` for
//! the full pipeline driven by one reproducible configuration and `synth`
//! for generating benchmark graphs. Relative output paths are placed under
//! `$DEPROLES_OUT_ROOT` when that variable is set.

mod config;

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use deproles::closure::{descendant_closure, ClosureOptions};
use deproles::clustering::{k_sweep, Clustering, InitMethod};
use deproles::graph::{DependencyGraph, NodeId};
use deproles::ingest::{
    load_edge_list, load_registry_json, read_matrix_csv, write_edge_list, write_matrix_csv,
};
use deproles::matrix::DissimilarityMatrix;
use deproles::pipeline::{
    read_assignments_json, run_pipeline, write_assignments_json, write_block_means_csv,
    write_contraction_json, write_embedding_csv, write_node_list, write_partition_json,
    write_roles_json, write_sweep_csv, Assignments, ClosureOrder, PipelineKind, RunConfig,
    RunSummary, SampleStatus,
};
use deproles::regular::{catrege, regular_dissimilarity, DistanceRule, DEFAULT_NODE_CAP};
use deproles::report::{
    blockmodel, classify_roles, embed_2d, write_pgm, RoleLabel, DEFAULT_ROLE_PURITY,
};
use deproles::sampling::{random_walk_sample, subseed, SampleSpec};
use deproles::structural::{structural_dissimilarity, StructuralOptions};
use deproles::synth::{planted_roles, PlantedSpec};

/// Environment variable naming the root directory for relative output paths.
const OUT_ROOT_ENV: &str = "DEPROLES_OUT_ROOT";

#[derive(Parser)]
#[command(
    name = "deproles",
    version,
    about = "Discover package roles in dependency networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate a graph, print its size, optionally normalize it.
    Ingest(IngestArgs),
    /// Draw random-walk samples and write them out.
    Sample(SampleArgs),
    /// Close a graph over all transitive dependencies.
    Closure(ClosureArgs),
    /// Shared-dependency dissimilarity matrix for a whole graph.
    Structural(StructuralArgs),
    /// Role-refinement dissimilarity matrix for a whole graph.
    Regular(RegularArgs),
    /// Cluster an existing dissimilarity matrix around medoids.
    Cluster(ClusterArgs),
    /// Blockmodel, embedding, and role labels from matrix plus assignments.
    Report(ReportArgs),
    /// Full pipeline: sample, score, cluster, report.
    Run(Box<RunArgs>),
    /// Generate a synthetic three-tier dependency graph.
    Synth(SynthArgs),
}

/// Input graph file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// `from,to` lines, `#` comments allowed.
    EdgeList,
    /// JSON array of `{"name", "dependencies"}` records.
    RegistryJson,
}

#[derive(Args)]
struct InputArgs {
    /// Input graph file.
    input: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct IngestArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Mirror every edge.
    #[arg(long)]
    symmetrize: bool,
    /// Write the normalized graph as an edge list.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Distinct nodes to collect per sample.
    #[arg(long)]
    sample_size: usize,
    /// Number of samples.
    #[arg(long, default_value_t = 1)]
    samples: usize,
    /// Master seed; sample i walks with a derived subseed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restart probability per step.
    #[arg(long, default_value_t = 0.15)]
    restart_prob: f64,
    /// Step cap per walk (default: 100 per requested node).
    #[arg(long)]
    max_steps: Option<usize>,
    /// Write each sample under DIR/sample_NNN/.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ClosureArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Abort when the closed graph would exceed this many edges.
    #[arg(long, default_value_t = ClosureOptions::default().edge_budget)]
    edge_budget: u64,
    /// Output edge list.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StructuralArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Skip the descendant closure (on by default).
    #[arg(long)]
    no_closure: bool,
    /// Mirror every edge before scoring (after any closure).
    #[arg(long)]
    symmetrize: bool,
    /// Per-node predecessor-pair budget.
    #[arg(long, default_value_t = StructuralOptions::default().pair_budget)]
    pair_budget: u64,
    /// Edge budget of the closure.
    #[arg(long, default_value_t = ClosureOptions::default().edge_budget)]
    edge_budget: u64,
    /// Where to write matrix.csv and contraction.json.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RegularArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Close over descendants first (off by default).
    #[arg(long)]
    closure: bool,
    /// Edge budget of the closure.
    #[arg(long, default_value_t = ClosureOptions::default().edge_budget)]
    edge_budget: u64,
    /// How split iterations map to dissimilarities.
    #[arg(long, value_enum, default_value_t = DistanceArg::Inverse)]
    distance: DistanceArg,
    /// Refuse graphs larger than this.
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    node_cap: usize,
    /// Proceed past the node cap.
    #[arg(long)]
    force: bool,
    /// Print the role count after every refinement iteration.
    #[arg(long)]
    trace: bool,
    /// Where to write matrix.csv and role_partition.json.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    /// Dissimilarity matrix CSV (label header plus square rows).
    matrix: PathBuf,
    /// Cluster at exactly this k.
    #[arg(long, conflicts_with_all = ["k_min", "k_max"])]
    k: Option<usize>,
    /// Smallest k of the sweep (default 2).
    #[arg(long)]
    k_min: Option<usize>,
    /// Largest k of the sweep (default min(20, n)).
    #[arg(long)]
    k_max: Option<usize>,
    /// Medoid initialization.
    #[arg(long, value_enum, default_value_t = InitArg::Build)]
    init: InitArg,
    /// Seed for random initialization.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write sweep.csv and assignments.json here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Dissimilarity matrix CSV.
    matrix: PathBuf,
    /// assignments.json produced by `cluster` or `run`.
    assignments: PathBuf,
    /// Graph file for role labels (labels must match the matrix).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Graph format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Purity threshold for role labels.
    #[arg(long, default_value_t = DEFAULT_ROLE_PURITY)]
    purity: f64,
    /// Where to write the report files.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Key/value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Which dissimilarity to compute (default structural).
    #[arg(long, value_enum)]
    pipeline: Option<PipelineArg>,
    /// Mirror every edge before scoring.
    #[arg(long, value_name = "BOOL")]
    symmetrize: Option<bool>,
    /// Draw random-walk samples (false analyzes the whole graph).
    #[arg(long, value_name = "BOOL")]
    sample: Option<bool>,
    /// Analyze the whole graph; shorthand for --sample false.
    #[arg(long, conflicts_with = "sample")]
    no_sample: bool,
    /// Nodes per sample.
    #[arg(long)]
    sample_size: Option<usize>,
    /// Number of samples.
    #[arg(long)]
    samples: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Restart probability of the sampling walk.
    #[arg(long)]
    restart_prob: Option<f64>,
    /// Step cap per walk.
    #[arg(long)]
    max_steps: Option<usize>,
    /// Smallest cluster count to try.
    #[arg(long)]
    k_min: Option<usize>,
    /// Largest cluster count to try.
    #[arg(long)]
    k_max: Option<usize>,
    /// Medoid initialization.
    #[arg(long, value_enum)]
    init: Option<InitArg>,
    /// Run the descendant closure.
    #[arg(long, value_name = "BOOL")]
    closure: Option<bool>,
    /// Closure placement relative to sampling.
    #[arg(long, value_enum)]
    closure_order: Option<ClosureOrderArg>,
    /// Where to write per-sample artifacts and summary.json.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Purity threshold for role labels.
    #[arg(long)]
    purity: Option<f64>,
    /// Per-node predecessor-pair budget of the structural scorer.
    #[arg(long)]
    pair_budget: Option<u64>,
    /// Edge budget of the closure.
    #[arg(long)]
    edge_budget: Option<u64>,
    /// Node cap of the role refinement.
    #[arg(long)]
    node_cap: Option<usize>,
    /// Proceed past the node cap.
    #[arg(long, value_name = "BOOL")]
    allow_over_cap: Option<bool>,
    /// How split iterations map to dissimilarities.
    #[arg(long, value_enum)]
    distance: Option<DistanceArg>,
}

#[derive(Args)]
struct SynthArgs {
    /// Size preset the explicit counts override.
    #[arg(long, value_enum, default_value_t = PresetArg::Small)]
    preset: PresetArg,
    /// Core packages (depend on nothing).
    #[arg(long)]
    cores: Option<usize>,
    /// Mid-tier packages (depend on cores).
    #[arg(long)]
    mids: Option<usize>,
    /// Leaf packages (depend on cores and sometimes mids).
    #[arg(long)]
    leaves: Option<usize>,
    /// Minimum core dependencies per mid.
    #[arg(long)]
    mid_core_min: Option<usize>,
    /// Maximum core dependencies per mid.
    #[arg(long)]
    mid_core_max: Option<usize>,
    /// Core dependencies per leaf.
    #[arg(long)]
    leaf_core_deps: Option<usize>,
    /// Probability that a leaf also depends on mids.
    #[arg(long)]
    leaf_mid_prob: Option<f64>,
    /// Mid dependencies per leaf, when it has any.
    #[arg(long)]
    leaf_mid_deps: Option<usize>,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output edge list.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PipelineArg {
    Structural,
    Regular,
}

impl From<PipelineArg> for PipelineKind {
    fn from(value: PipelineArg) -> Self {
        match value {
            PipelineArg::Structural => PipelineKind::Structural,
            PipelineArg::Regular => PipelineKind::Regular,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InitArg {
    Build,
    Random,
}

impl From<InitArg> for InitMethod {
    fn from(value: InitArg) -> Self {
        match value {
            InitArg::Build => InitMethod::Build,
            InitArg::Random => InitMethod::Random,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClosureOrderArg {
    SampleThenClose,
    CloseThenSample,
}

impl From<ClosureOrderArg> for ClosureOrder {
    fn from(value: ClosureOrderArg) -> Self {
        match value {
            ClosureOrderArg::SampleThenClose => ClosureOrder::SampleThenClose,
            ClosureOrderArg::CloseThenSample => ClosureOrder::CloseThenSample,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DistanceArg {
    /// Dissimilarity 1/t for a pair split at iteration t.
    Inverse,
    /// Dissimilarity (T - t + 1)/T over T total iterations.
    Remaining,
}

impl From<DistanceArg> for DistanceRule {
    fn from(value: DistanceArg) -> Self {
        match value {
            DistanceArg::Inverse => DistanceRule::InverseIteration,
            DistanceArg::Remaining => DistanceRule::RemainingFraction,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PresetArg {
    /// 10 cores, 40 mids, 450 leaves.
    Small,
    /// 40 cores, 200 mids, 760 leaves (about 8000 edges).
    Large,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Closure(args) => cmd_closure(args),
        Command::Structural(args) => cmd_structural(args),
        Command::Regular(args) => cmd_regular(args),
        Command::Cluster(args) => cmd_cluster(args),
        Command::Report(args) => cmd_report(args),
        Command::Run(args) => cmd_run(*args),
        Command::Synth(args) => cmd_synth(args),
    }
}

/// Places a relative output path under `$DEPROLES_OUT_ROOT` when set.
fn resolve_out(path: PathBuf) -> PathBuf {
    if path.is_relative() {
        if let Some(root) = std::env::var_os(OUT_ROOT_ENV) {
            return PathBuf::from(root).join(path);
        }
    }
    path
}

fn load_graph(args: &InputArgs) -> Result<DependencyGraph> {
    let format = args.format.unwrap_or_else(|| {
        match args.input.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::RegistryJson,
            _ => Format::EdgeList,
        }
    });
    let graph = match format {
        Format::EdgeList => load_edge_list(&args.input)?,
        Format::RegistryJson => load_registry_json(&args.input)?,
    };
    Ok(graph)
}

fn create_out_dir(dir: PathBuf) -> Result<PathBuf> {
    let dir = resolve_out(dir);
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(dir)
}

fn role_name(label: RoleLabel) -> &'static str {
    match label {
        RoleLabel::Core => "core",
        RoleLabel::Popular => "popular",
        RoleLabel::Supplementary => "supplementary",
        RoleLabel::Other => "other",
    }
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let mut g = load_graph(&args.input)?;
    if args.symmetrize {
        g = g.symmetrized();
    }
    let external = g.node_ids().filter(|&v| g.is_external(v)).count();
    println!("nodes: {}", g.node_count());
    println!("edges: {}", g.edge_count());
    println!("external nodes: {external}");
    if let Some(out) = args.out {
        let out = resolve_out(out);
        write_edge_list(&g, &out)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_sample(args: SampleArgs) -> Result<()> {
    let g = load_graph(&args.input)?;
    let out_dir = args.out_dir.map(create_out_dir).transpose()?;
    for i in 0..args.samples {
        let mut spec = SampleSpec::new(args.sample_size, subseed(args.seed, i));
        spec.restart_probability = args.restart_prob;
        if let Some(max_steps) = args.max_steps {
            spec.max_steps = max_steps;
        }
        let sample = random_walk_sample(&g, &spec)?;
        println!(
            "sample {i}: nodes={} edges={} steps={} truncated={}",
            sample.subgraph.node_count(),
            sample.subgraph.edge_count(),
            sample.steps,
            sample.truncated
        );
        if let Some(dir) = &out_dir {
            let dir = dir.join(format!("sample_{i:03}"));
            std::fs::create_dir_all(&dir)
                .with_context(|| format!("creating {}", dir.display()))?;
            write_node_list(&sample.subgraph, dir.join("nodes.csv"))?;
            write_edge_list(&sample.subgraph, dir.join("edges.csv"))?;
        }
    }
    Ok(())
}

fn cmd_closure(args: ClosureArgs) -> Result<()> {
    let g = load_graph(&args.input)?;
    let closed = descendant_closure(
        &g,
        &ClosureOptions {
            edge_budget: args.edge_budget,
        },
    )?;
    println!("edges: {} -> {}", g.edge_count(), closed.edge_count());
    let out = resolve_out(args.out);
    write_edge_list(&closed, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_structural(args: StructuralArgs) -> Result<()> {
    let g = load_graph(&args.input)?;
    let mut analysis = g.clone();
    if !args.no_closure {
        analysis = descendant_closure(
            &analysis,
            &ClosureOptions {
                edge_budget: args.edge_budget,
            },
        )?;
    }
    if args.symmetrize {
        analysis = analysis.symmetrized();
    }
    let (matrix, survivors, contraction) = structural_dissimilarity(
        &analysis,
        &StructuralOptions {
            pair_budget: args.pair_budget,
        },
    )?;
    println!(
        "nodes: {} -> {} after merging {} duplicates",
        g.node_count(),
        survivors.len(),
        contraction.merged_count()
    );
    let dir = create_out_dir(args.out_dir)?;
    let labels: Vec<String> = survivors.iter().map(|&v| g.label(v).to_string()).collect();
    write_matrix_csv(&matrix, &labels, dir.join("matrix.csv"))?;
    write_contraction_json(&g, &contraction, dir.join("contraction.json"))?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn cmd_regular(args: RegularArgs) -> Result<()> {
    let g = load_graph(&args.input)?;
    let analysis = if args.closure {
        descendant_closure(
            &g,
            &ClosureOptions {
                edge_budget: args.edge_budget,
            },
        )?
    } else {
        g.clone()
    };
    let n = analysis.node_count();
    ensure!(
        n <= args.node_cap || args.force,
        "graph has {n} nodes, over the cap of {}; pass --force to proceed",
        args.node_cap
    );
    let partition = catrege(&analysis);
    if args.trace {
        for t in 0..=partition.total_iterations() {
            let roles: std::collections::BTreeSet<u32> =
                partition.assignment_at(t).iter().copied().collect();
            println!("iteration {t}: {} roles", roles.len());
        }
    }
    println!(
        "roles: {} after {} iterations",
        partition.role_count(),
        partition.total_iterations()
    );
    let matrix = regular_dissimilarity(&partition, args.distance.into());
    let dir = create_out_dir(args.out_dir)?;
    let labels: Vec<String> = g.node_ids().map(|v| g.label(v).to_string()).collect();
    write_matrix_csv(&matrix, &labels, dir.join("matrix.csv"))?;
    write_partition_json(&g, &partition, dir.join("role_partition.json"))?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn cmd_cluster(args: ClusterArgs) -> Result<()> {
    let (matrix, labels) = read_matrix_csv(&args.matrix)?;
    let n = matrix.len();
    let (k_min, k_max) = match args.k {
        Some(k) => (k, k),
        None => {
            let k_min = args.k_min.unwrap_or(if n < 2 { 1 } else { 2 });
            (k_min, args.k_max.unwrap_or(n.min(20)).max(k_min))
        }
    };
    let sweep = k_sweep(&matrix, k_min, k_max, args.init.into(), args.seed)?;
    for entry in &sweep.entries {
        match entry.mean_silhouette {
            Some(s) => println!(
                "k={} cost={:.6} silhouette={:.6}",
                entry.k, entry.clustering.cost, s
            ),
            None => println!("k={} cost={:.6} silhouette=-", entry.k, entry.clustering.cost),
        }
    }
    let chosen = match sweep.best_entry() {
        Some(best) => {
            println!(
                "best k: {} (mean silhouette {:.6})",
                best.k,
                best.mean_silhouette.unwrap()
            );
            best
        }
        None => &sweep.entries[0],
    };
    if let Some(dir) = args.out_dir {
        let dir = create_out_dir(dir)?;
        write_sweep_csv(&sweep, dir.join("sweep.csv"))?;
        let assignments = Assignments::from_clustering(&labels, &chosen.clustering);
        write_assignments_json(&assignments, dir.join("assignments.json"))?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}

/// Rebuilds a clustering from its label-keyed file form.
fn rebuild_clustering(
    matrix: &DissimilarityMatrix,
    labels: &[String],
    assignments: &Assignments,
) -> Result<Clustering> {
    let index: HashMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let lookup = |label: &str| -> Result<usize> {
        index
            .get(label)
            .copied()
            .with_context(|| format!("label '{label}' is not in the matrix"))
    };
    let medoids: Vec<usize> = assignments
        .medoids
        .iter()
        .map(|l| lookup(l))
        .collect::<Result<_>>()?;
    ensure!(!medoids.is_empty(), "assignments list no medoids");
    let mut assignment = vec![usize::MAX; labels.len()];
    for (label, &cluster) in &assignments.assignment {
        ensure!(
            cluster < medoids.len(),
            "label '{label}' assigned to cluster {cluster}, but there are {} medoids",
            medoids.len()
        );
        assignment[lookup(label)?] = cluster;
    }
    if let Some(i) = assignment.iter().position(|&c| c == usize::MAX) {
        bail!("assignments are missing label '{}'", labels[i]);
    }
    let cost = assignment
        .iter()
        .enumerate()
        .map(|(i, &c)| matrix.get(i, medoids[c]))
        .sum();
    Ok(Clustering {
        k: medoids.len(),
        medoids,
        assignment,
        cost,
    })
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let (matrix, labels) = read_matrix_csv(&args.matrix)?;
    let assignments = read_assignments_json(&args.assignments)?;
    let clustering = rebuild_clustering(&matrix, &labels, &assignments)?;
    let block = blockmodel(&matrix, &clustering)?;

    let dir = create_out_dir(args.out_dir)?;
    write_pgm(&block.reordered, dir.join("blockmodel.pgm"))?;
    write_block_means_csv(&block, dir.join("block_means.csv"))?;
    let embedding = if matrix.len() >= 3 {
        Some(embed_2d(&matrix)?)
    } else {
        None
    };
    write_embedding_csv(
        &labels,
        embedding.as_ref(),
        &clustering.assignment,
        dir.join("embedding.csv"),
    )?;

    let k = block.cluster_order.len();
    for a in 0..k {
        let row: Vec<String> = (0..k).map(|b| format!("{:.4}", block.mean(a, b))).collect();
        println!(
            "cluster {} (size {}): {}",
            block.cluster_order[a],
            block.cluster_sizes[a],
            row.join(" ")
        );
    }

    if let Some(graph_path) = args.graph {
        let g = load_graph(&InputArgs {
            input: graph_path,
            format: args.format,
        })?;
        let nodes: Vec<NodeId> = labels
            .iter()
            .map(|l| {
                g.node_by_label(l)
                    .with_context(|| format!("label '{l}' is not in the graph"))
            })
            .collect::<Result<_>>()?;
        let roles = classify_roles(&g, &clustering, &nodes, args.purity)?;
        for role in &roles {
            println!(
                "cluster {}: {} ({} members)",
                role.cluster,
                role_name(role.label),
                role.evidence.members
            );
        }
        write_roles_json(&roles, dir.join("cluster_roles.json"))?;
    }
    println!("wrote {}", dir.display());
    Ok(())
}

/// Merges defaults, config file, and flags into one run configuration.
fn build_run_config(args: &RunArgs) -> Result<RunConfig> {
    let entries = match &args.config {
        Some(path) => config::parse_file(path)?,
        None => BTreeMap::new(),
    };
    let pipeline = args
        .pipeline
        .map(PipelineKind::from)
        .or(config::pipeline_from_entries(&entries)?)
        .unwrap_or(PipelineKind::Structural);
    let mut cfg = match pipeline {
        PipelineKind::Structural => RunConfig::structural(),
        PipelineKind::Regular => RunConfig::regular(),
    };
    config::apply_entries(&mut cfg, &entries)?;
    cfg.pipeline = pipeline;

    if let Some(v) = args.symmetrize {
        cfg.symmetrize = v;
    }
    if args.no_sample {
        cfg.sample = false;
    }
    if let Some(v) = args.sample {
        cfg.sample = v;
    }
    if let Some(v) = args.sample_size {
        cfg.sample_size = v;
    }
    if let Some(v) = args.samples {
        cfg.sample_count = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.restart_prob {
        cfg.restart_probability = v;
    }
    if let Some(v) = args.max_steps {
        cfg.max_steps = Some(v);
    }
    if let Some(v) = args.k_min {
        cfg.k_min = v;
    }
    if let Some(v) = args.k_max {
        cfg.k_max = v;
    }
    if let Some(v) = args.init {
        cfg.init = v.into();
    }
    if let Some(v) = args.closure {
        cfg.closure = v;
    }
    if let Some(v) = args.closure_order {
        cfg.closure_order = v.into();
    }
    if let Some(v) = &args.out_dir {
        cfg.out_dir = Some(v.clone());
    }
    if let Some(v) = args.purity {
        cfg.role_purity = v;
    }
    if let Some(v) = args.pair_budget {
        cfg.pair_budget = v;
    }
    if let Some(v) = args.edge_budget {
        cfg.edge_budget = v;
    }
    if let Some(v) = args.node_cap {
        cfg.node_cap = v;
    }
    if let Some(v) = args.allow_over_cap {
        cfg.allow_over_cap = v;
    }
    if let Some(v) = args.distance {
        cfg.distance_rule = v.into();
    }
    if let Some(dir) = cfg.out_dir.take() {
        cfg.out_dir = Some(resolve_out(dir));
    }
    Ok(cfg)
}

fn print_summary(summary: &RunSummary) {
    for rec in &summary.samples {
        match rec.status {
            SampleStatus::Ok => {
                let best = match (rec.best_k, rec.best_silhouette) {
                    (Some(k), Some(s)) => format!("best k={k} silhouette={s:.4}"),
                    _ => "no k selected".to_string(),
                };
                let roles: Vec<&str> = rec.roles.iter().map(|&r| role_name(r)).collect();
                println!(
                    "sample {}: nodes={} edges={} matrix={} identical={} {best} roles=[{}]",
                    rec.index,
                    rec.nodes,
                    rec.edges,
                    rec.matrix_size,
                    rec.identical_nodes,
                    roles.join(", ")
                );
            }
            SampleStatus::Failed => {
                println!(
                    "sample {}: failed: {}",
                    rec.index,
                    rec.reason.as_deref().unwrap_or("unknown")
                );
            }
        }
    }
    let a = &summary.aggregates;
    println!("samples: {} ok, {} failed", a.samples_ok, a.samples_failed);
    println!(
        "nodes: mean {:.1} (std {:.1}); edges: mean {:.1} (std {:.1}); identical: mean {:.1} (std {:.1})",
        a.mean_nodes, a.std_nodes, a.mean_edges, a.std_edges,
        a.mean_identical_nodes, a.std_identical_nodes
    );
    if let Some(s) = a.mean_best_silhouette {
        println!("mean best silhouette: {s:.4}");
    }
    if !a.best_k_histogram.is_empty() {
        let parts: Vec<String> = a
            .best_k_histogram
            .iter()
            .map(|(k, count)| format!("k={k}: {count}"))
            .collect();
        println!("best-k histogram: {}", parts.join(", "));
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let cfg = build_run_config(&args)?;
    let g = load_graph(&args.input)?;
    let summary = run_pipeline(&g, &cfg)?;
    print_summary(&summary);
    if let Some(dir) = &cfg.out_dir {
        println!("wrote {}", dir.display());
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let mut spec = match args.preset {
        PresetArg::Small => PlantedSpec::small(args.seed),
        PresetArg::Large => PlantedSpec::large(args.seed),
    };
    if let Some(v) = args.cores {
        spec.cores = v;
    }
    if let Some(v) = args.mids {
        spec.mids = v;
    }
    if let Some(v) = args.leaves {
        spec.leaves = v;
    }
    if let Some(v) = args.mid_core_min {
        spec.mid_core_min = v;
    }
    if let Some(v) = args.mid_core_max {
        spec.mid_core_max = v;
    }
    if let Some(v) = args.leaf_core_deps {
        spec.leaf_core_deps = v;
    }
    if let Some(v) = args.leaf_mid_prob {
        spec.leaf_mid_prob = v;
    }
    if let Some(v) = args.leaf_mid_deps {
        spec.leaf_mid_deps = v;
    }
    let g = planted_roles(&spec)?;
    println!("nodes: {}", g.node_count());
    println!("edges: {}", g.edge_count());
    let out = resolve_out(args.out);
    write_edge_list(&g, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
