//! Reporting: blockmodel views, planar embedding, and role labels.
//!
//! The blockmodel permutes the dissimilarity matrix so clusters occupy
//! contiguous index ranges and summarizes each cluster pair by its mean
//! dissimilarity; the permuted matrix can be exported as a grayscale PGM
//! image. The embedding projects the matrix to two dimensions by classical
//! scaling (double-center the squared dissimilarities, take the top two
//! eigenpairs). Role labels classify each cluster by the connection profile
//! of its members in the underlying graph.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::clustering::Clustering;
use crate::graph::{DependencyGraph, Direction, NodeId};
use crate::matrix::DissimilarityMatrix;

/// Cluster-contiguous view of a dissimilarity matrix.
#[derive(Debug)]
pub struct BlockModel {
    /// Matrix indices in display order: clusters by descending size (ties by
    /// medoid index), members ascending within each cluster.
    pub order: Vec<usize>,
    /// Cluster ids in the same display order as the index blocks.
    pub cluster_order: Vec<usize>,
    /// Sizes of the clusters in display order.
    pub cluster_sizes: Vec<usize>,
    /// The permuted matrix.
    pub reordered: DissimilarityMatrix,
    /// Mean dissimilarity per cluster pair, k x k row-major in display
    /// order. Diagonal entries average over distinct member pairs; a
    /// singleton cluster reports 0.
    pub block_mean: Vec<f64>,
}

impl BlockModel {
    /// Mean dissimilarity between display blocks `a` and `b`.
    pub fn mean(&self, a: usize, b: usize) -> f64 {
        self.block_mean[a * self.cluster_order.len() + b]
    }
}

/// Permutes `m` so each cluster is contiguous and summarizes block means.
pub fn blockmodel(m: &DissimilarityMatrix, c: &Clustering) -> Result<BlockModel> {
    let n = m.len();
    if c.assignment.len() != n {
        return Err(Error::InvalidParameter(format!(
            "assignment covers {} nodes, matrix has {n}",
            c.assignment.len()
        )));
    }
    let members = c.members();
    let mut cluster_order: Vec<usize> = (0..c.k).collect();
    cluster_order.sort_by_key(|&cl| (std::cmp::Reverse(members[cl].len()), c.medoids[cl]));

    let mut order = Vec::with_capacity(n);
    let mut cluster_sizes = Vec::with_capacity(c.k);
    for &cl in &cluster_order {
        cluster_sizes.push(members[cl].len());
        order.extend_from_slice(&members[cl]);
    }

    let mut reordered = DissimilarityMatrix::zeros(n);
    for (i, &oi) in order.iter().enumerate() {
        for (j, &oj) in order.iter().enumerate() {
            if i != j {
                reordered.set_pair(i, j, m.get(oi, oj));
            }
        }
    }

    let k = c.k;
    let mut block_mean = vec![0.0f64; k * k];
    for (a, &ca) in cluster_order.iter().enumerate() {
        for (b, &cb) in cluster_order.iter().enumerate() {
            let (ma, mb) = (&members[ca], &members[cb]);
            let mean = if a == b {
                let sz = ma.len();
                if sz < 2 {
                    0.0
                } else {
                    let mut sum = 0.0;
                    for (x, &i) in ma.iter().enumerate() {
                        for &j in &ma[x + 1..] {
                            sum += m.get(i, j);
                        }
                    }
                    sum / (sz * (sz - 1) / 2) as f64
                }
            } else {
                let mut sum = 0.0;
                for &i in ma {
                    for &j in mb {
                        sum += m.get(i, j);
                    }
                }
                sum / (ma.len() * mb.len()) as f64
            };
            block_mean[a * k + b] = mean;
        }
    }

    Ok(BlockModel {
        order,
        cluster_order,
        cluster_sizes,
        reordered,
        block_mean,
    })
}

/// Writes a matrix as a binary 8-bit PGM image: 0 maps to black, 1 to white,
/// linearly in between.
pub fn write_pgm(m: &DissimilarityMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let n = m.len();
    let mut bytes = Vec::with_capacity(n * n + 32);
    bytes.extend_from_slice(format!("P5\n{n} {n}\n255\n").as_bytes());
    for i in 0..n {
        for &v in m.row(i) {
            bytes.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
        }
    }
    fs::write(path, bytes).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Planar projection of a dissimilarity matrix.
#[derive(Debug)]
pub struct Embedding {
    /// One (x, y) coordinate pair per matrix index.
    pub coords: Vec<(f64, f64)>,
    /// Share of the total positive eigenvalue mass captured by the two axes.
    pub captured_fraction: f64,
    /// True when fewer than two positive eigenvalues existed; missing axes
    /// are emitted as zeros.
    pub degenerate: bool,
}

/// Classical scaling to two dimensions.
///
/// Squares the dissimilarities, double-centers them, and uses the top two
/// eigenpairs of the resulting Gram matrix as axes scaled by the square
/// roots of their eigenvalues. Needs at least three nodes.
pub fn embed_2d(m: &DissimilarityMatrix) -> Result<Embedding> {
    let n = m.len();
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "embedding needs at least 3 nodes, got {n}"
        )));
    }

    // B = -1/2 * J D^2 J with J the centering matrix.
    let mut b = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let d = m.get(i, j);
            b[(i, j)] = d * d;
        }
    }
    let row_means: Vec<f64> = (0..n).map(|i| b.row(i).sum() / n as f64).collect();
    let grand_mean: f64 = row_means.iter().sum::<f64>() / n as f64;
    for i in 0..n {
        for j in 0..n {
            // The matrix is symmetric, so column means equal row means.
            b[(i, j)] = -0.5 * (b[(i, j)] - row_means[i] - row_means[j] + grand_mean);
        }
    }

    let eigen = b.symmetric_eigen();
    let mut pairs: Vec<(f64, usize)> = eigen
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));

    // Treat eigenvalues at numerical-noise scale as zero.
    let lambda_max = pairs.first().map_or(0.0, |p| p.0);
    let cutoff = lambda_max.max(0.0) * 1e-12;
    let positive: Vec<(f64, usize)> = pairs.iter().copied().filter(|&(v, _)| v > cutoff).collect();
    let positive_mass: f64 = positive.iter().map(|&(v, _)| v).sum();

    let mut coords = vec![(0.0, 0.0); n];
    let mut captured = 0.0;
    for (axis, &(value, col)) in positive.iter().take(2).enumerate() {
        let scale = value.sqrt();
        captured += value;
        for i in 0..n {
            let x = eigen.eigenvectors[(i, col)] * scale;
            if axis == 0 {
                coords[i].0 = x;
            } else {
                coords[i].1 = x;
            }
        }
    }
    let degenerate = positive.len() < 2;
    let captured_fraction = if positive_mass > 0.0 {
        captured / positive_mass
    } else {
        0.0
    };
    Ok(Embedding {
        coords,
        captured_fraction,
        degenerate,
    })
}

/// Functional role of a cluster in the dependency network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RoleLabel {
    /// Almost all members only have dependents.
    Core,
    /// Almost all members only have dependencies.
    Supplementary,
    /// Almost all members have both, with dependencies outweighing dependents.
    Popular,
    /// No profile reached the purity threshold.
    Other,
}

/// Degree-profile counts backing a role label.
#[derive(Debug, Clone, Serialize)]
pub struct RoleEvidence {
    /// Cluster size.
    pub members: usize,
    /// Members with dependents only (in-edges, no out-edges).
    pub in_only: usize,
    /// Members with dependencies only (out-edges, no in-edges).
    pub out_only: usize,
    /// Members with both.
    pub both: usize,
    /// Members with neither.
    pub isolated: usize,
    /// Mean in-degree over the cluster.
    pub mean_in_degree: f64,
    /// Mean out-degree over the cluster.
    pub mean_out_degree: f64,
}

/// Label and evidence for one cluster.
#[derive(Debug, Clone, Serialize)]
pub struct RoleSummary {
    /// Cluster id (position in the clustering's medoid list).
    pub cluster: usize,
    /// Assigned label.
    pub label: RoleLabel,
    /// Counts the label was derived from.
    pub evidence: RoleEvidence,
}

/// Default purity threshold: a profile must cover 90% of a cluster.
pub const DEFAULT_ROLE_PURITY: f64 = 0.9;

/// Classifies every cluster by its members' connection profiles in `g`.
///
/// `nodes[i]` names the graph node behind matrix index `i`, so clusterings
/// computed over contracted or re-indexed matrices can still be evaluated
/// against the graph they came from. A cluster is `core` when at least
/// `purity` of its members have only dependents, `supplementary` when only
/// dependencies, `popular` when both kinds are present on almost all members
/// and the mean out-degree exceeds the mean in-degree, `other` otherwise.
pub fn classify_roles(
    g: &DependencyGraph,
    c: &Clustering,
    nodes: &[NodeId],
    purity: f64,
) -> Result<Vec<RoleSummary>> {
    if nodes.len() != c.assignment.len() {
        return Err(Error::InvalidParameter(format!(
            "{} node mappings for {} assignments",
            nodes.len(),
            c.assignment.len()
        )));
    }
    if !(0.0..=1.0).contains(&purity) {
        return Err(Error::InvalidParameter(format!(
            "purity {purity} outside [0, 1]"
        )));
    }
    let mut summaries = Vec::with_capacity(c.k);
    for (cluster, members) in c.members().into_iter().enumerate() {
        let mut ev = RoleEvidence {
            members: members.len(),
            in_only: 0,
            out_only: 0,
            both: 0,
            isolated: 0,
            mean_in_degree: 0.0,
            mean_out_degree: 0.0,
        };
        for &idx in &members {
            let v = nodes[idx];
            let din = g.degree(v, Direction::In);
            let dout = g.degree(v, Direction::Out);
            ev.mean_in_degree += din as f64;
            ev.mean_out_degree += dout as f64;
            match (din > 0, dout > 0) {
                (true, false) => ev.in_only += 1,
                (false, true) => ev.out_only += 1,
                (true, true) => ev.both += 1,
                (false, false) => ev.isolated += 1,
            }
        }
        if !members.is_empty() {
            ev.mean_in_degree /= members.len() as f64;
            ev.mean_out_degree /= members.len() as f64;
        }
        let need = purity * ev.members as f64;
        let label = if ev.members > 0 && ev.in_only as f64 >= need {
            RoleLabel::Core
        } else if ev.members > 0 && ev.out_only as f64 >= need {
            RoleLabel::Supplementary
        } else if ev.members > 0
            && ev.both as f64 >= need
            && ev.mean_out_degree > ev.mean_in_degree
        {
            RoleLabel::Popular
        } else {
            RoleLabel::Other
        };
        summaries.push(RoleSummary {
            cluster,
            label,
            evidence: ev,
        });
    }
    Ok(summaries)
}
