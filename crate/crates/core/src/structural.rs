//! Structural equivalence: cosine similarity over shared dependencies.
//!
//! Two packages are structurally similar when they depend on many of the
//! same packages: the score is |Γi ∩ Γj| / sqrt(ki * kj) over out-neighbor
//! sets. Only pairs with at least one common dependency can score above
//! zero, so instead of comparing all pairs the scorer picks each node and
//! examines pairs of its predecessors — every such pair shares the picked
//! node. Pairs whose out-neighborhoods are exactly equal are contracted into
//! one representative instead of receiving a score; remaining scores are
//! expressed over the surviving representatives.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::{DependencyGraph, Direction, NodeId};
use crate::matrix::DissimilarityMatrix;

/// Tuning knobs for [`structural_similarity_graph`].
#[derive(Debug, Clone)]
pub struct StructuralOptions {
    /// Abort when one picked node contributes more predecessor pairs than this.
    pub pair_budget: u64,
}

impl Default for StructuralOptions {
    fn default() -> Self {
        StructuralOptions {
            pair_budget: 1_000_000,
        }
    }
}

/// One scored pair, expressed over contraction representatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityEdge {
    /// Smaller endpoint.
    pub a: NodeId,
    /// Larger endpoint.
    pub b: NodeId,
    /// Cosine similarity of the two out-neighborhoods, in `(0, 1)`.
    pub cosine: f64,
}

/// Groups of nodes whose out-neighborhoods are exactly equal.
#[derive(Debug, Clone)]
pub struct ContractionMap {
    representative: Vec<NodeId>,
}

impl ContractionMap {
    /// Representative of `v`'s class; `v` itself when nothing merged into it.
    pub fn representative(&self, v: NodeId) -> NodeId {
        self.representative[v.index()]
    }

    /// Nodes that survive contraction, ascending.
    pub fn survivors(&self) -> Vec<NodeId> {
        (0..self.representative.len())
            .map(NodeId::new)
            .filter(|&v| self.representative[v.index()] == v)
            .collect()
    }

    /// Classes with at least two members, sorted by representative; each
    /// class lists its members ascending (the representative comes first).
    pub fn classes(&self) -> Vec<Vec<NodeId>> {
        let mut grouped: std::collections::BTreeMap<NodeId, Vec<NodeId>> =
            std::collections::BTreeMap::new();
        for (i, &rep) in self.representative.iter().enumerate() {
            grouped.entry(rep).or_default().push(NodeId::new(i));
        }
        grouped.into_values().filter(|c| c.len() > 1).collect()
    }

    /// Number of nodes folded into another node's class.
    pub fn merged_count(&self) -> usize {
        self.representative
            .iter()
            .enumerate()
            .filter(|&(i, &rep)| rep != NodeId::new(i))
            .count()
    }
}

/// Cosine similarity of the out-neighborhoods of `i` and `j`.
///
/// Errors when either node has no outgoing edges, since the score divides by
/// both out-degrees.
pub fn cosine_similarity(g: &DependencyGraph, i: NodeId, j: NodeId) -> Result<f64> {
    let ki = g.degree(i, Direction::Out);
    let kj = g.degree(j, Direction::Out);
    if ki == 0 {
        return Err(Error::ZeroOutDegree(g.label(i).to_owned()));
    }
    if kj == 0 {
        return Err(Error::ZeroOutDegree(g.label(j).to_owned()));
    }
    let common = sorted_intersection_len(g.out_neighbors(i), g.out_neighbors(j));
    Ok(common as f64 / ((ki as f64) * (kj as f64)).sqrt())
}

fn sorted_intersection_len(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Union-find keyed so that the smallest member becomes the root.
struct MinUnionFind {
    parent: Vec<u32>,
}

impl MinUnionFind {
    fn new(n: usize) -> Self {
        MinUnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, v: u32) -> u32 {
        let mut root = v;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = v;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        // The smaller id stays the root, keeping representatives canonical.
        if ra < rb {
            self.parent[rb as usize] = ra;
        } else {
            self.parent[ra as usize] = rb;
        }
    }
}

/// Result of the edge-driven structural scorer.
#[derive(Debug)]
pub struct StructuralSimilarity {
    /// Scored pairs over contraction representatives, sorted by endpoints.
    pub edges: Vec<SimilarityEdge>,
    /// Exact-duplicate classes found along the way.
    pub contraction: ContractionMap,
}

/// Scores every pair of nodes that shares at least one dependency.
///
/// For each node the scorer walks all pairs of its predecessors (dependents),
/// so a pair is examined exactly once per run even when it shares many
/// dependencies. Pairs with byte-identical out-neighborhoods are merged in
/// the contraction map; every other examined pair yields a [`SimilarityEdge`]
/// between its class representatives.
pub fn structural_similarity_graph(
    g: &DependencyGraph,
    options: &StructuralOptions,
) -> Result<StructuralSimilarity> {
    let n = g.node_count();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut uf = MinUnionFind::new(n);
    let mut scored: Vec<(u32, u32, f64)> = Vec::new();

    for v in g.node_ids() {
        let preds = g.in_neighbors(v);
        let p = preds.len() as u64;
        if p >= 2 {
            let pairs = p * (p - 1) / 2;
            if pairs > options.pair_budget {
                return Err(Error::PairBudget {
                    label: g.label(v).to_owned(),
                    predecessors: preds.len(),
                    pairs,
                    budget: options.pair_budget,
                });
            }
        }
        for (x, &i) in preds.iter().enumerate() {
            for &j in &preds[x + 1..] {
                // in-adjacency is sorted, so i < j already.
                let key = (i.0 as u64) << 32 | j.0 as u64;
                if !seen.insert(key) {
                    continue;
                }
                let gi = g.out_neighbors(i);
                let gj = g.out_neighbors(j);
                if gi == gj {
                    uf.union(i.0, j.0);
                } else {
                    let common = sorted_intersection_len(gi, gj);
                    let cosine = common as f64 / ((gi.len() as f64) * (gj.len() as f64)).sqrt();
                    scored.push((i.0, j.0, cosine));
                }
            }
        }
    }

    let representative: Vec<NodeId> = (0..n as u32).map(|v| NodeId(uf.find(v))).collect();

    // Re-express scored pairs over representatives. Members of one class have
    // identical neighborhoods, so duplicates resolving to the same pair carry
    // the same score; keep the first.
    let mut rep_edges: std::collections::BTreeMap<(u32, u32), f64> = std::collections::BTreeMap::new();
    for (i, j, cosine) in scored {
        let ri = representative[i as usize].0;
        let rj = representative[j as usize].0;
        if ri == rj {
            continue;
        }
        let key = (ri.min(rj), ri.max(rj));
        let prev = rep_edges.insert(key, cosine);
        if let Some(prev) = prev {
            debug_assert_eq!(prev, cosine, "same class pair scored differently");
        }
    }

    let edges: Vec<SimilarityEdge> = rep_edges
        .into_iter()
        .map(|((a, b), cosine)| SimilarityEdge {
            a: NodeId(a),
            b: NodeId(b),
            cosine,
        })
        .collect();

    Ok(StructuralSimilarity {
        edges,
        contraction: ContractionMap { representative },
    })
}

/// Converts similarity edges into a dissimilarity matrix over `n` indices.
///
/// Scored pairs get `1 - cosine`; pairs that never scored stay at the
/// maximal dissimilarity 1; the diagonal is 0.
pub fn to_dissimilarity(edges: &[SimilarityEdge], n: usize) -> Result<DissimilarityMatrix> {
    let mut m = DissimilarityMatrix::filled(n, 1.0);
    for e in edges {
        if e.a.index() >= n || e.b.index() >= n {
            return Err(Error::EdgeOutOfRange(e.a.index().max(e.b.index()), n));
        }
        m.set_pair(e.a.index(), e.b.index(), 1.0 - e.cosine);
    }
    Ok(m)
}

/// Full structural stage: score, contract, and build the dissimilarity
/// matrix over the surviving representatives.
///
/// Returns the matrix, the survivors in ascending id order (row `i` of the
/// matrix belongs to `survivors[i]`), and the contraction map.
pub fn structural_dissimilarity(
    g: &DependencyGraph,
    options: &StructuralOptions,
) -> Result<(DissimilarityMatrix, Vec<NodeId>, ContractionMap)> {
    let StructuralSimilarity { edges, contraction } = structural_similarity_graph(g, options)?;
    let survivors = contraction.survivors();
    let mut dense = vec![u32::MAX; g.node_count()];
    for (row, &v) in survivors.iter().enumerate() {
        dense[v.index()] = row as u32;
    }
    let remapped: Vec<SimilarityEdge> = edges
        .iter()
        .map(|e| SimilarityEdge {
            a: NodeId(dense[e.a.index()]),
            b: NodeId(dense[e.b.index()]),
            cosine: e.cosine,
        })
        .collect();
    let matrix = to_dissimilarity(&remapped, survivors.len())?;
    Ok((matrix, survivors, contraction))
}
