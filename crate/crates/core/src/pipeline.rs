//! End-to-end analysis runs: sample, augment, score, cluster, report.
//!
//! A run takes one dependency graph and a [`RunConfig`], draws any number of
//! random-walk samples (or analyzes the whole graph), optionally closes each
//! sample over descendants, computes the configured dissimilarity, sweeps a
//! range of cluster counts, and writes per-sample reports plus an aggregate
//! summary. Every stage draws randomness from seeds derived from the one
//! master seed, so a run is reproducible byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::closure::{descendant_closure, ClosureOptions};
use crate::clustering::{k_sweep, InitMethod, KSweep};
use crate::error::{Error, Result};
use crate::graph::{DependencyGraph, NodeId};
use crate::ingest::{write_edge_list, write_matrix_csv};
use crate::matrix::DissimilarityMatrix;
use crate::regular::{
    catrege, regular_dissimilarity, DistanceRule, RolePartition, DEFAULT_NODE_CAP,
};
use crate::report::{
    blockmodel, classify_roles, embed_2d, write_pgm, BlockModel, Embedding, RoleLabel,
    RoleSummary, DEFAULT_ROLE_PURITY,
};
use crate::sampling::{random_walk_sample, subseed, SampleSpec};
use crate::structural::{structural_dissimilarity, ContractionMap, StructuralOptions};

/// Which dissimilarity the run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PipelineKind {
    /// Shared-dependency cosine scoring with exact-duplicate contraction.
    Structural,
    /// Iterative role refinement over neighbor-role profiles.
    Regular,
}

/// When the descendant closure runs relative to sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosureOrder {
    /// Sample the raw graph, then close each sample (default).
    SampleThenClose,
    /// Close the whole graph once, then sample from the closed graph.
    CloseThenSample,
}

/// Full configuration of one reproducible run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Which dissimilarity to compute.
    pub pipeline: PipelineKind,
    /// Mirror every edge before scoring (applied after any closure).
    pub symmetrize: bool,
    /// Draw random-walk samples; off analyzes the whole graph once.
    pub sample: bool,
    /// Nodes per sample (clamped to the graph size).
    pub sample_size: usize,
    /// Number of samples.
    pub sample_count: usize,
    /// Master seed; sample `i` uses a derived subseed.
    pub seed: u64,
    /// Restart probability of the sampling walk.
    pub restart_probability: f64,
    /// Step cap per walk; `None` uses 100 steps per requested node.
    pub max_steps: Option<usize>,
    /// Smallest cluster count to try.
    pub k_min: usize,
    /// Largest cluster count to try (clamped to the matrix size).
    pub k_max: usize,
    /// Medoid initialization method.
    pub init: InitMethod,
    /// Run the descendant closure.
    pub closure: bool,
    /// Closure placement relative to sampling.
    pub closure_order: ClosureOrder,
    /// Where to write outputs; `None` keeps the run in memory.
    pub out_dir: Option<PathBuf>,
    /// Purity threshold for role labels.
    pub role_purity: f64,
    /// Per-node predecessor-pair budget of the structural scorer.
    pub pair_budget: u64,
    /// Edge budget of the descendant closure.
    pub edge_budget: u64,
    /// Node cap for the iterative role refinement.
    pub node_cap: usize,
    /// Proceed past the node cap instead of failing the sample.
    pub allow_over_cap: bool,
    /// How split iterations map to dissimilarities.
    pub distance_rule: DistanceRule,
}

impl RunConfig {
    /// Structural-pipeline defaults: 20 samples of 1000 nodes, k in [1, 30],
    /// closure on.
    pub fn structural() -> Self {
        RunConfig {
            pipeline: PipelineKind::Structural,
            symmetrize: false,
            sample: true,
            sample_size: 1000,
            sample_count: 20,
            seed: 0,
            restart_probability: 0.15,
            max_steps: None,
            k_min: 1,
            k_max: 30,
            init: InitMethod::Build,
            closure: true,
            closure_order: ClosureOrder::SampleThenClose,
            out_dir: None,
            role_purity: DEFAULT_ROLE_PURITY,
            pair_budget: StructuralOptions::default().pair_budget,
            edge_budget: ClosureOptions::default().edge_budget,
            node_cap: DEFAULT_NODE_CAP,
            allow_over_cap: false,
            distance_rule: DistanceRule::InverseIteration,
        }
    }

    /// Regular-pipeline defaults: 20 samples of 500 nodes, k in [2, 20],
    /// closure off.
    pub fn regular() -> Self {
        RunConfig {
            pipeline: PipelineKind::Regular,
            sample_size: 500,
            k_min: 2,
            k_max: 20,
            closure: false,
            ..RunConfig::structural()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sample && self.sample_size == 0 {
            return Err(Error::InvalidParameter("sample_size must be positive".into()));
        }
        if self.sample && self.sample_count == 0 {
            return Err(Error::InvalidParameter("sample_count must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.restart_probability) {
            return Err(Error::InvalidParameter(format!(
                "restart_probability {} outside [0, 1]",
                self.restart_probability
            )));
        }
        if !(0.0..=1.0).contains(&self.role_purity) {
            return Err(Error::InvalidParameter(format!(
                "role_purity {} outside [0, 1]",
                self.role_purity
            )));
        }
        if self.k_min < 1 || self.k_min > self.k_max {
            return Err(Error::InvalidKRange(self.k_min, self.k_max));
        }
        Ok(())
    }
}

/// Outcome of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleStatus {
    /// All stages completed.
    Ok,
    /// A stage failed; see the reason.
    Failed,
}

/// Per-sample results recorded in the run summary.
#[derive(Debug, Serialize)]
pub struct SampleRecord {
    /// Sample index, also the output directory suffix.
    pub index: usize,
    /// Derived seed the sample ran with.
    pub seed: u64,
    /// Whether the sample completed.
    pub status: SampleStatus,
    /// Failure reason, for failed samples.
    pub reason: Option<String>,
    /// Nodes in the sampled graph.
    pub nodes: usize,
    /// Edges in the sampled graph (post-closure when sampling a closed graph).
    pub edges: usize,
    /// Edge count after closing the sample, when closure ran on it.
    pub closed_edges: Option<usize>,
    /// Rows of the dissimilarity matrix.
    pub matrix_size: usize,
    /// Nodes belonging to a zero-dissimilarity group of two or more.
    pub identical_nodes: usize,
    /// k with the best mean silhouette, when any k had one.
    pub best_k: Option<usize>,
    /// Best mean silhouette.
    pub best_silhouette: Option<f64>,
    /// Role label per cluster of the chosen clustering.
    pub roles: Vec<RoleLabel>,
    /// True when the sampling walk hit its step cap early.
    pub truncated: bool,
}

/// Statistics over the successful samples of a run.
#[derive(Debug, Serialize)]
pub struct Aggregates {
    /// Samples that completed.
    pub samples_ok: usize,
    /// Samples that failed.
    pub samples_failed: usize,
    /// Mean node count.
    pub mean_nodes: f64,
    /// Population standard deviation of node counts.
    pub std_nodes: f64,
    /// Mean edge count.
    pub mean_edges: f64,
    /// Population standard deviation of edge counts.
    pub std_edges: f64,
    /// Mean count of nodes with a zero-dissimilarity twin.
    pub mean_identical_nodes: f64,
    /// Population standard deviation of that count.
    pub std_identical_nodes: f64,
    /// Mean best silhouette over samples that selected a k.
    pub mean_best_silhouette: Option<f64>,
    /// How often each k won the sweep.
    pub best_k_histogram: BTreeMap<usize, usize>,
}

/// Everything a run produced, also written as `summary.json`.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    /// Which pipeline ran.
    pub pipeline: PipelineKind,
    /// Master seed.
    pub seed: u64,
    /// One record per sample, in order.
    pub samples: Vec<SampleRecord>,
    /// Statistics over the successful samples.
    pub aggregates: Aggregates,
}

/// In-memory artifacts of one completed sample.
struct SampleArtifacts {
    sample_graph: DependencyGraph,
    truncated: bool,
    closed_edges: Option<usize>,
    matrix: DissimilarityMatrix,
    labels: Vec<String>,
    contraction: Option<ContractionMap>,
    partition: Option<RolePartition>,
    sweep: KSweep,
    chosen: usize,
    block: BlockModel,
    embedding: Option<Embedding>,
    roles: Vec<RoleSummary>,
    identical_nodes: usize,
}

/// Runs the configured pipeline over `g`.
///
/// Each sample is analyzed independently: a failing stage marks that sample
/// failed with a reason and the run continues. When `out_dir` is set, every
/// sample writes its artifacts under `sample_NNN/` and the run writes
/// `summary.json`; the summary is derived from the per-sample artifacts and
/// can be recomputed from them.
pub fn run_pipeline(g: &DependencyGraph, cfg: &RunConfig) -> Result<RunSummary> {
    cfg.validate()?;
    if g.node_count() == 0 {
        return Err(Error::InvalidParameter("input graph is empty".into()));
    }
    if let Some(dir) = &cfg.out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    }

    // With close-then-sample ordering the closure runs once, up front.
    let closed_full = if cfg.closure && cfg.closure_order == ClosureOrder::CloseThenSample {
        Some(descendant_closure(
            g,
            &ClosureOptions {
                edge_budget: cfg.edge_budget,
            },
        )?)
    } else {
        None
    };
    let base = closed_full.as_ref().unwrap_or(g);

    let runs = if cfg.sample { cfg.sample_count } else { 1 };
    let mut samples = Vec::with_capacity(runs);
    for index in 0..runs {
        let seed = subseed(cfg.seed, index);
        let record = match run_sample(base, cfg, seed) {
            Ok(art) => {
                let written = match &cfg.out_dir {
                    Some(dir) => write_sample_dir(&dir.join(format!("sample_{index:03}")), &art),
                    None => Ok(()),
                };
                match written {
                    Ok(()) => ok_record(index, seed, &art),
                    Err(e) => failed_record(index, seed, e),
                }
            }
            Err(e) => failed_record(index, seed, e),
        };
        samples.push(record);
    }

    let aggregates = aggregate(&samples);
    let summary = RunSummary {
        pipeline: cfg.pipeline,
        seed: cfg.seed,
        samples,
        aggregates,
    };
    if let Some(dir) = &cfg.out_dir {
        write_json(&summary, &dir.join("summary.json"))?;
    }
    Ok(summary)
}

/// Runs every stage for one sample.
fn run_sample(base: &DependencyGraph, cfg: &RunConfig, seed: u64) -> Result<SampleArtifacts> {
    let (sample_graph, truncated) = if cfg.sample {
        let mut spec = SampleSpec::new(cfg.sample_size.min(base.node_count()), seed);
        spec.restart_probability = cfg.restart_probability;
        if let Some(max_steps) = cfg.max_steps {
            spec.max_steps = max_steps;
        }
        let sample = random_walk_sample(base, &spec)?;
        (sample.subgraph, sample.truncated)
    } else {
        (base.clone(), false)
    };

    let mut analysis = sample_graph.clone();
    let mut closed_edges = None;
    if cfg.closure && cfg.closure_order == ClosureOrder::SampleThenClose {
        analysis = descendant_closure(
            &analysis,
            &ClosureOptions {
                edge_budget: cfg.edge_budget,
            },
        )?;
        closed_edges = Some(analysis.edge_count());
    }
    if cfg.symmetrize {
        analysis = analysis.symmetrized();
    }

    let (matrix, nodes, contraction, partition, identical_nodes) = match cfg.pipeline {
        PipelineKind::Structural => {
            let (matrix, survivors, contraction) = structural_dissimilarity(
                &analysis,
                &StructuralOptions {
                    pair_budget: cfg.pair_budget,
                },
            )?;
            let identical: usize = contraction.classes().iter().map(Vec::len).sum();
            (matrix, survivors, Some(contraction), None, identical)
        }
        PipelineKind::Regular => {
            let n = analysis.node_count();
            if n > cfg.node_cap && !cfg.allow_over_cap {
                return Err(Error::NodeCapExceeded {
                    nodes: n,
                    cap: cfg.node_cap,
                });
            }
            let partition = catrege(&analysis);
            let matrix = regular_dissimilarity(&partition, cfg.distance_rule);
            let identical: usize = partition
                .role_members()
                .iter()
                .map(|m| if m.len() > 1 { m.len() } else { 0 })
                .sum();
            let nodes: Vec<NodeId> = analysis.node_ids().collect();
            (matrix, nodes, None, Some(partition), identical)
        }
    };
    let labels: Vec<String> = nodes
        .iter()
        .map(|&v| sample_graph.label(v).to_string())
        .collect();

    let n = matrix.len();
    let k_max = cfg.k_max.min(n);
    if cfg.k_min > k_max {
        return Err(Error::InvalidKRange(cfg.k_min, k_max));
    }
    let sweep = k_sweep(&matrix, cfg.k_min, k_max, cfg.init, seed)?;
    let chosen = sweep.best.unwrap_or(0);

    let clustering = &sweep.entries[chosen].clustering;
    let block = blockmodel(&matrix, clustering)?;
    let embedding = if n >= 3 { Some(embed_2d(&matrix)?) } else { None };
    // Roles are judged on the raw sampled dependency structure, not the
    // closed or mirrored scoring view; node ids are stable across both.
    let roles = classify_roles(&sample_graph, clustering, &nodes, cfg.role_purity)?;

    Ok(SampleArtifacts {
        sample_graph,
        truncated,
        closed_edges,
        matrix,
        labels,
        contraction,
        partition,
        sweep,
        chosen,
        block,
        embedding,
        roles,
        identical_nodes,
    })
}

fn ok_record(index: usize, seed: u64, art: &SampleArtifacts) -> SampleRecord {
    SampleRecord {
        index,
        seed,
        status: SampleStatus::Ok,
        reason: None,
        nodes: art.sample_graph.node_count(),
        edges: art.sample_graph.edge_count(),
        closed_edges: art.closed_edges,
        matrix_size: art.matrix.len(),
        identical_nodes: art.identical_nodes,
        best_k: art.sweep.best_entry().map(|e| e.k),
        best_silhouette: art.sweep.best_entry().and_then(|e| e.mean_silhouette),
        roles: art.roles.iter().map(|r| r.label).collect(),
        truncated: art.truncated,
    }
}

fn failed_record(index: usize, seed: u64, error: Error) -> SampleRecord {
    SampleRecord {
        index,
        seed,
        status: SampleStatus::Failed,
        reason: Some(error.to_string()),
        nodes: 0,
        edges: 0,
        closed_edges: None,
        matrix_size: 0,
        identical_nodes: 0,
        best_k: None,
        best_silhouette: None,
        roles: Vec::new(),
        truncated: false,
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn aggregate(samples: &[SampleRecord]) -> Aggregates {
    let ok: Vec<&SampleRecord> = samples
        .iter()
        .filter(|s| s.status == SampleStatus::Ok)
        .collect();
    let nodes: Vec<f64> = ok.iter().map(|s| s.nodes as f64).collect();
    let edges: Vec<f64> = ok.iter().map(|s| s.edges as f64).collect();
    let identical: Vec<f64> = ok.iter().map(|s| s.identical_nodes as f64).collect();
    let (mean_nodes, std_nodes) = mean_std(&nodes);
    let (mean_edges, std_edges) = mean_std(&edges);
    let (mean_identical_nodes, std_identical_nodes) = mean_std(&identical);

    let best: Vec<f64> = ok.iter().filter_map(|s| s.best_silhouette).collect();
    let mean_best_silhouette = if best.is_empty() {
        None
    } else {
        Some(best.iter().sum::<f64>() / best.len() as f64)
    };
    let mut best_k_histogram = BTreeMap::new();
    for s in &ok {
        if let Some(k) = s.best_k {
            *best_k_histogram.entry(k).or_insert(0) += 1;
        }
    }

    Aggregates {
        samples_ok: ok.len(),
        samples_failed: samples.len() - ok.len(),
        mean_nodes,
        std_nodes,
        mean_edges,
        std_edges,
        mean_identical_nodes,
        std_identical_nodes,
        mean_best_silhouette,
        best_k_histogram,
    }
}

#[derive(Serialize)]
struct ContractionFile {
    survivors: Vec<String>,
    classes: BTreeMap<String, Vec<String>>,
}

#[derive(Serialize)]
struct PartitionFile {
    total_iterations: usize,
    roles: Vec<Vec<String>>,
}

/// A clustering keyed by node label, as stored in `assignments.json`.
#[derive(Debug, Serialize, serde::Deserialize)]
pub struct Assignments {
    /// Medoid labels; the cluster id is the position in this list.
    pub medoids: Vec<String>,
    /// Cluster id per node label.
    pub assignment: BTreeMap<String, usize>,
}

impl Assignments {
    /// Captures a clustering over the given per-row labels.
    pub fn from_clustering(labels: &[String], c: &crate::clustering::Clustering) -> Self {
        Assignments {
            medoids: c.medoids.iter().map(|&m| labels[m].clone()).collect(),
            assignment: labels
                .iter()
                .cloned()
                .zip(c.assignment.iter().copied())
                .collect(),
        }
    }
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Json {
        path: path.display().to_string(),
        source: e,
    })?;
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(|e| Error::io(path.display().to_string(), e))
}

fn write_string(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Writes node labels one per line.
pub fn write_node_list(g: &DependencyGraph, path: impl AsRef<Path>) -> Result<()> {
    let mut csv = String::new();
    for v in g.node_ids() {
        csv.push_str(g.label(v));
        csv.push('\n');
    }
    write_string(path.as_ref(), &csv)
}

/// Writes a contraction map as JSON: surviving labels plus every merged
/// class keyed by its representative.
pub fn write_contraction_json(
    g: &DependencyGraph,
    contraction: &ContractionMap,
    path: impl AsRef<Path>,
) -> Result<()> {
    let label = |v: NodeId| g.label(v).to_string();
    let file = ContractionFile {
        survivors: contraction.survivors().iter().map(|&v| label(v)).collect(),
        classes: contraction
            .classes()
            .into_iter()
            .map(|class| (label(class[0]), class.into_iter().map(label).collect()))
            .collect(),
    };
    write_json(&file, path.as_ref())
}

/// Writes a role partition as JSON: iteration count plus the member labels
/// of every final role.
pub fn write_partition_json(
    g: &DependencyGraph,
    partition: &RolePartition,
    path: impl AsRef<Path>,
) -> Result<()> {
    let file = PartitionFile {
        total_iterations: partition.total_iterations(),
        roles: partition
            .role_members()
            .iter()
            .map(|members| members.iter().map(|&v| g.label(v).to_string()).collect())
            .collect(),
    };
    write_json(&file, path.as_ref())
}

/// Writes a sweep as `k,mean_silhouette` CSV; the silhouette field is empty
/// for k = 1.
pub fn write_sweep_csv(sweep: &KSweep, path: impl AsRef<Path>) -> Result<()> {
    let mut csv = String::from("k,mean_silhouette\n");
    for entry in &sweep.entries {
        match entry.mean_silhouette {
            Some(s) => writeln!(csv, "{},{}", entry.k, s).unwrap(),
            None => writeln!(csv, "{},", entry.k).unwrap(),
        }
    }
    write_string(path.as_ref(), &csv)
}

/// Writes a label-keyed clustering as JSON.
pub fn write_assignments_json(a: &Assignments, path: impl AsRef<Path>) -> Result<()> {
    write_json(a, path.as_ref())
}

/// Reads a label-keyed clustering back.
pub fn read_assignments_json(path: impl AsRef<Path>) -> Result<Assignments> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Json {
        path: path.display().to_string(),
        source: e,
    })
}

/// Writes block means as CSV with cluster ids in display order on both axes.
pub fn write_block_means_csv(block: &BlockModel, path: impl AsRef<Path>) -> Result<()> {
    let k = block.cluster_order.len();
    let mut csv = String::from("cluster");
    for &cl in &block.cluster_order {
        write!(csv, ",{cl}").unwrap();
    }
    csv.push('\n');
    for a in 0..k {
        write!(csv, "{}", block.cluster_order[a]).unwrap();
        for b in 0..k {
            write!(csv, ",{}", block.mean(a, b)).unwrap();
        }
        csv.push('\n');
    }
    write_string(path.as_ref(), &csv)
}

/// Writes planar coordinates as `node,x,y,cluster` CSV; `None` writes the
/// header alone (graphs too small to embed).
pub fn write_embedding_csv(
    labels: &[String],
    embedding: Option<&Embedding>,
    assignment: &[usize],
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut csv = String::from("node,x,y,cluster\n");
    if let Some(embedding) = embedding {
        for (i, &(x, y)) in embedding.coords.iter().enumerate() {
            writeln!(csv, "{},{x},{y},{}", labels[i], assignment[i]).unwrap();
        }
    }
    write_string(path.as_ref(), &csv)
}

/// Writes role summaries as JSON.
pub fn write_roles_json(roles: &[RoleSummary], path: impl AsRef<Path>) -> Result<()> {
    write_json(&roles, path.as_ref())
}

/// Writes every artifact of one sample into `dir`.
fn write_sample_dir(dir: &Path, art: &SampleArtifacts) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;

    write_node_list(&art.sample_graph, dir.join("nodes.csv"))?;
    write_edge_list(&art.sample_graph, dir.join("edges.csv"))?;
    write_matrix_csv(&art.matrix, &art.labels, dir.join("matrix.csv"))?;

    if let Some(contraction) = &art.contraction {
        write_contraction_json(&art.sample_graph, contraction, dir.join("contraction.json"))?;
    }
    if let Some(partition) = &art.partition {
        write_partition_json(&art.sample_graph, partition, dir.join("role_partition.json"))?;
    }

    write_sweep_csv(&art.sweep, dir.join("sweep.csv"))?;

    let clustering = &art.sweep.entries[art.chosen].clustering;
    let assignments = Assignments::from_clustering(&art.labels, clustering);
    write_assignments_json(&assignments, dir.join("assignments.json"))?;

    write_pgm(&art.block.reordered, dir.join("blockmodel.pgm"))?;
    write_block_means_csv(&art.block, dir.join("block_means.csv"))?;
    write_embedding_csv(
        &art.labels,
        art.embedding.as_ref(),
        &clustering.assignment,
        dir.join("embedding.csv"),
    )?;
    write_roles_json(&art.roles, dir.join("cluster_roles.json"))?;
    Ok(())
}
