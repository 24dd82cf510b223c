//! k-medoids partitioning (PAM) with silhouette-guided selection of k.
//!
//! BUILD seeds the medoids greedily: the first is the exact 1-median, each
//! following one maximizes the drop in total cost. SWAP then replaces one
//! medoid with one non-medoid as long as some exchange strictly lowers the
//! summed distance to nearest medoids, evaluating every exchange per
//! iteration through per-medoid removal losses plus a shared accumulator.
//! Every tie — nearest medoid, best candidate, best swap — breaks toward the
//! lowest index, so results are reproducible; the optional random
//! initialization draws from an explicitly seeded stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::DissimilarityMatrix;

/// Medoid seeding strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMethod {
    /// Deterministic greedy seeding; ignores the seed.
    #[default]
    Build,
    /// k distinct indices drawn from a seeded stream, then refined by SWAP.
    Random,
}

/// A k-medoids clustering of a dissimilarity matrix.
#[derive(Debug, Clone)]
pub struct Clustering {
    /// Number of clusters.
    pub k: usize,
    /// Matrix index of each cluster's medoid; position = cluster id.
    pub medoids: Vec<usize>,
    /// Cluster id of every matrix index.
    pub assignment: Vec<usize>,
    /// Sum over all points of the distance to their nearest medoid.
    pub cost: f64,
}

impl Clustering {
    /// Member indices per cluster, each list ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &c) in self.assignment.iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}

/// Nearest/second-nearest medoid cache: (nearest position, d_nearest, d_second).
struct Binding {
    nearest: Vec<usize>,
    d_near: Vec<f64>,
    d_seco: Vec<f64>,
}

fn rebind(m: &DissimilarityMatrix, medoids: &[usize]) -> Binding {
    let n = m.len();
    let mut nearest = vec![0usize; n];
    let mut d_near = vec![f64::INFINITY; n];
    let mut d_seco = vec![f64::INFINITY; n];
    for j in 0..n {
        for (pos, &med) in medoids.iter().enumerate() {
            let d = m.get(j, med);
            if d < d_near[j] {
                d_seco[j] = d_near[j];
                d_near[j] = d;
                nearest[j] = pos;
            } else if d < d_seco[j] {
                d_seco[j] = d;
            }
        }
    }
    Binding {
        nearest,
        d_near,
        d_seco,
    }
}

fn total_cost(m: &DissimilarityMatrix, medoids: &[usize]) -> f64 {
    let n = m.len();
    let mut cost = 0.0;
    for j in 0..n {
        let mut best = f64::INFINITY;
        for &med in medoids {
            let d = m.get(j, med);
            if d < best {
                best = d;
            }
        }
        cost += best;
    }
    cost
}

/// Greedy BUILD seeding: 1-median first, then maximal cost reduction.
fn build_init(m: &DissimilarityMatrix, k: usize) -> Vec<usize> {
    let n = m.len();
    let mut medoids = Vec::with_capacity(k);

    let mut best_i = 0usize;
    let mut best_sum = f64::INFINITY;
    for i in 0..n {
        let sum: f64 = (0..n).map(|j| m.get(i, j)).sum();
        if sum < best_sum {
            best_sum = sum;
            best_i = i;
        }
    }
    medoids.push(best_i);

    let mut d_near: Vec<f64> = (0..n).map(|j| m.get(best_i, j)).collect();
    let mut is_medoid = vec![false; n];
    is_medoid[best_i] = true;
    while medoids.len() < k {
        let mut best_c = usize::MAX;
        let mut best_reduction = f64::NEG_INFINITY;
        for c in 0..n {
            if is_medoid[c] {
                continue;
            }
            let mut reduction = 0.0;
            for j in 0..n {
                let d = m.get(c, j);
                if d < d_near[j] {
                    reduction += d_near[j] - d;
                }
            }
            if reduction > best_reduction {
                best_reduction = reduction;
                best_c = c;
            }
        }
        is_medoid[best_c] = true;
        medoids.push(best_c);
        for j in 0..n {
            let d = m.get(best_c, j);
            if d < d_near[j] {
                d_near[j] = d;
            }
        }
    }
    medoids
}

fn assign(m: &DissimilarityMatrix, medoids: &[usize]) -> (Vec<usize>, f64) {
    let n = m.len();
    let mut assignment = vec![0usize; n];
    let mut cost = 0.0;
    let mut medoid_of = vec![usize::MAX; n];
    for (pos, &med) in medoids.iter().enumerate() {
        medoid_of[med] = pos;
    }
    for j in 0..n {
        if medoid_of[j] != usize::MAX {
            // A medoid always belongs to its own cluster, even when another
            // medoid sits at distance zero.
            assignment[j] = medoid_of[j];
            continue;
        }
        let mut best_pos = 0usize;
        let mut best_d = f64::INFINITY;
        for (pos, &med) in medoids.iter().enumerate() {
            let d = m.get(j, med);
            if d < best_d {
                best_d = d;
                best_pos = pos;
            }
        }
        assignment[j] = best_pos;
        cost += best_d;
    }
    (assignment, cost)
}

/// Partitions the matrix into `k` clusters around medoids.
///
/// `seed` feeds the random initialization and is ignored by [`InitMethod::Build`].
/// The result is a local optimum of the total distance to nearest medoids:
/// no single medoid/non-medoid exchange can lower it further.
pub fn pam(
    m: &DissimilarityMatrix,
    k: usize,
    init: InitMethod,
    seed: u64,
) -> Result<Clustering> {
    pam_with_trace(m, k, init, seed).map(|(c, _)| c)
}

/// Like [`pam`], also returning the total cost after seeding and after every
/// accepted swap (a strictly decreasing sequence).
pub fn pam_with_trace(
    m: &DissimilarityMatrix,
    k: usize,
    init: InitMethod,
    seed: u64,
) -> Result<(Clustering, Vec<f64>)> {
    let n = m.len();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }

    let mut medoids = match init {
        InitMethod::Build => build_init(m, k),
        InitMethod::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picks = rand::seq::index::sample(&mut rng, n, k).into_vec();
            picks.sort_unstable();
            picks
        }
    };

    let mut cost = total_cost(m, &medoids);
    let mut trace = vec![cost];

    if k == 1 {
        // The only exchange replaces the single medoid, so the exact
        // 1-median is the local (and global) optimum. BUILD already sits
        // there; random init may not.
        let mut best_i = medoids[0];
        let mut best_sum = cost;
        for i in 0..n {
            let sum: f64 = (0..n).map(|j| m.get(i, j)).sum();
            if sum < best_sum {
                best_sum = sum;
                best_i = i;
            }
        }
        if best_i != medoids[0] {
            medoids[0] = best_i;
            cost = best_sum;
            trace.push(cost);
        }
    } else if k < n {
        let mut is_medoid = vec![false; n];
        for &med in &medoids {
            is_medoid[med] = true;
        }
        loop {
            let binding = rebind(m, &medoids);
            let mut removal_loss = vec![0.0f64; k];
            for j in 0..n {
                removal_loss[binding.nearest[j]] += binding.d_seco[j] - binding.d_near[j];
            }

            let mut best: Option<(f64, usize, usize)> = None; // (delta, pos, candidate)
            for o in 0..n {
                if is_medoid[o] {
                    continue;
                }
                let mut acc = 0.0f64;
                let mut ploss = removal_loss.clone();
                for j in 0..n {
                    let d = m.get(o, j);
                    if d < binding.d_near[j] {
                        acc += d - binding.d_near[j];
                        ploss[binding.nearest[j]] += binding.d_near[j] - binding.d_seco[j];
                    } else if d < binding.d_seco[j] {
                        ploss[binding.nearest[j]] += d - binding.d_seco[j];
                    }
                }
                let mut best_pos = 0usize;
                let mut best_loss = ploss[0];
                for (pos, &l) in ploss.iter().enumerate().skip(1) {
                    if l < best_loss {
                        best_loss = l;
                        best_pos = pos;
                    }
                }
                let delta = best_loss + acc;
                if best.map_or(delta < 0.0, |(bd, _, _)| delta < bd) {
                    best = Some((delta, best_pos, o));
                }
            }

            let Some((_, pos, candidate)) = best else {
                break;
            };
            let old = medoids[pos];
            medoids[pos] = candidate;
            let new_cost = total_cost(m, &medoids);
            if new_cost < cost {
                is_medoid[old] = false;
                is_medoid[candidate] = true;
                cost = new_cost;
                trace.push(cost);
            } else {
                // The estimated gain did not survive exact recomputation.
                medoids[pos] = old;
                break;
            }
        }
    }

    let (assignment, cost) = assign(m, &medoids);
    Ok((
        Clustering {
            k,
            medoids,
            assignment,
            cost,
        },
        trace,
    ))
}

/// Per-node and aggregated silhouette widths of a clustering.
#[derive(Debug, Clone)]
pub struct SilhouetteReport {
    /// Silhouette width of every matrix index, in `[-1, 1]`.
    pub per_node: Vec<f64>,
    /// Mean width per cluster id (0.0 for an empty cluster).
    pub per_cluster_mean: Vec<f64>,
    /// Unweighted mean width over all nodes.
    pub overall_mean: f64,
}

/// Computes silhouette widths: `s = (b - a) / max(a, b)` with `a` the mean
/// in-cluster distance and `b` the best mean distance to another cluster.
///
/// A node alone in its cluster contributes `a = 0`, so it scores 1 against
/// positively separated clusters and 0 when the nearest cluster sits at
/// distance zero. Needs at least two clusters.
pub fn silhouette(m: &DissimilarityMatrix, c: &Clustering) -> Result<SilhouetteReport> {
    let n = m.len();
    if c.k < 2 {
        return Err(Error::SilhouetteUndefined);
    }
    if c.assignment.len() != n {
        return Err(Error::InvalidParameter(format!(
            "assignment covers {} nodes, matrix has {n}",
            c.assignment.len()
        )));
    }
    let mut sizes = vec![0usize; c.k];
    for &cl in &c.assignment {
        sizes[cl] += 1;
    }

    let mut per_node = vec![0.0f64; n];
    let mut sums = vec![0.0f64; c.k];
    for i in 0..n {
        for s in sums.iter_mut() {
            *s = 0.0;
        }
        let row = m.row(i);
        for (j, &d) in row.iter().enumerate() {
            sums[c.assignment[j]] += d;
        }
        let own = c.assignment[i];
        let a = if sizes[own] > 1 {
            sums[own] / (sizes[own] - 1) as f64
        } else {
            0.0
        };
        let mut b = f64::INFINITY;
        for (cl, &size) in sizes.iter().enumerate() {
            if cl != own && size > 0 {
                let mean = sums[cl] / size as f64;
                if mean < b {
                    b = mean;
                }
            }
        }
        if b.is_infinite() {
            return Err(Error::InvalidParameter(
                "all other clusters are empty".into(),
            ));
        }
        per_node[i] = if a < b {
            1.0 - a / b
        } else if a > b {
            b / a - 1.0
        } else {
            0.0
        };
    }

    let mut per_cluster_mean = vec![0.0f64; c.k];
    for (i, &s) in per_node.iter().enumerate() {
        per_cluster_mean[c.assignment[i]] += s;
    }
    for (cl, mean) in per_cluster_mean.iter_mut().enumerate() {
        if sizes[cl] > 0 {
            *mean /= sizes[cl] as f64;
        }
    }
    let overall_mean = per_node.iter().sum::<f64>() / n as f64;
    Ok(SilhouetteReport {
        per_node,
        per_cluster_mean,
        overall_mean,
    })
}

/// One k tried by [`k_sweep`].
#[derive(Debug)]
pub struct SweepEntry {
    /// The k this entry used.
    pub k: usize,
    /// Clustering at this k.
    pub clustering: Clustering,
    /// Mean silhouette width; `None` for k = 1 where it is undefined.
    pub mean_silhouette: Option<f64>,
}

/// Result of sweeping a range of cluster counts.
#[derive(Debug)]
pub struct KSweep {
    /// One entry per k, ascending.
    pub entries: Vec<SweepEntry>,
    /// Position of the entry with the best mean silhouette (lowest k wins
    /// ties); `None` when no entry has a silhouette.
    pub best: Option<usize>,
}

impl KSweep {
    /// The winning entry, when any k produced a silhouette.
    pub fn best_entry(&self) -> Option<&SweepEntry> {
        self.best.map(|i| &self.entries[i])
    }
}

/// Clusters at every k in `[k_min, k_max]` and picks the k with the highest
/// mean silhouette.
///
/// For random initialization each k draws from its own stream derived from
/// `seed`, so single entries can be reproduced independently.
pub fn k_sweep(
    m: &DissimilarityMatrix,
    k_min: usize,
    k_max: usize,
    init: InitMethod,
    seed: u64,
) -> Result<KSweep> {
    let n = m.len();
    if k_min < 1 || k_min > k_max || k_max > n {
        return Err(Error::InvalidKRange(k_min, k_max));
    }
    let mut entries: Vec<SweepEntry> = Vec::with_capacity(k_max - k_min + 1);
    let mut best: Option<usize> = None;
    for k in k_min..=k_max {
        let clustering = pam(m, k, init, crate::sampling::subseed(seed, k))?;
        let mean_silhouette = if k >= 2 {
            Some(silhouette(m, &clustering)?.overall_mean)
        } else {
            None
        };
        if let Some(s) = mean_silhouette {
            let improves = match best {
                None => true,
                Some(b) => s > entries[b].mean_silhouette.unwrap_or(f64::NEG_INFINITY),
            };
            if improves {
                best = Some(entries.len());
            }
        }
        entries.push(SweepEntry {
            k,
            clustering,
            mean_silhouette,
        });
    }
    Ok(KSweep { entries, best })
}
