//! Regular equivalence by iterative role refinement.
//!
//! All nodes start in a single role. Each iteration splits roles apart by
//! neighbor-type profile: the pair of sets (roles present among in-neighbors,
//! roles present among out-neighbors) under the current assignment. With one
//! starting role that first profile reduces to the presence or absence of
//! in- and out-connections. Refinement only ever splits roles, so a fixpoint
//! is reached after at most n-1 iterations. The iteration at which a pair of
//! nodes first lands in different roles measures how early they became
//! distinguishable; its inverse serves as their dissimilarity.

use std::collections::HashMap;

use crate::graph::{DependencyGraph, NodeId};
use crate::matrix::DissimilarityMatrix;

/// Default node cap for the refinement; the pair bookkeeping is quadratic.
pub const DEFAULT_NODE_CAP: usize = 2000;

/// Outcome of the iterative refinement.
#[derive(Debug)]
pub struct RolePartition {
    /// Role assignment after every iteration; entry 0 is the all-one-role start.
    history: Vec<Vec<u32>>,
    /// Upper-triangular table of first-split iterations; 0 means never split.
    splits: Vec<u32>,
    n: usize,
}

impl RolePartition {
    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Final role of `v`.
    pub fn final_role(&self, v: NodeId) -> u32 {
        self.history.last().expect("history holds iteration 0")[v.index()]
    }

    /// Final role ids for all nodes, indexed by node id.
    pub fn final_roles(&self) -> &[u32] {
        self.history.last().expect("history holds iteration 0")
    }

    /// Number of distinct final roles.
    pub fn role_count(&self) -> usize {
        self.final_roles().iter().max().map_or(0, |&m| m as usize + 1)
    }

    /// Role assignment after iteration `t`; `t = 0` is the starting state.
    pub fn assignment_at(&self, t: usize) -> &[u32] {
        &self.history[t]
    }

    /// Number of refinement iterations that changed the partition.
    pub fn total_iterations(&self) -> usize {
        self.history.len() - 1
    }

    /// Iteration at which `i` and `j` first received different roles, or
    /// `None` when they share their final role.
    pub fn split_iteration(&self, i: NodeId, j: NodeId) -> Option<u32> {
        if i == j {
            return None;
        }
        let t = self.splits[self.pair_index(i, j)];
        (t != 0).then_some(t)
    }

    fn pair_index(&self, i: NodeId, j: NodeId) -> usize {
        let (a, b) = if i < j { (i.index(), j.index()) } else { (j.index(), i.index()) };
        // Upper triangle, row-major: pairs (a, b) with a < b.
        a * self.n - a * (a + 1) / 2 + (b - a - 1)
    }

    /// Final roles as member lists, ordered by role id; role ids are
    /// canonical (assigned by each role's smallest member).
    pub fn role_members(&self) -> Vec<Vec<NodeId>> {
        let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); self.role_count()];
        for (i, &r) in self.final_roles().iter().enumerate() {
            members[r as usize].push(NodeId::new(i));
        }
        members
    }
}

/// Runs the role refinement to its fixpoint.
pub fn catrege(g: &DependencyGraph) -> RolePartition {
    let n = g.node_count();
    if n == 0 {
        return RolePartition {
            history: vec![Vec::new()],
            splits: Vec::new(),
            n,
        };
    }
    let mut roles = vec![0u32; n];
    let mut history = vec![roles.clone()];
    let mut splits = vec![0u32; n * (n - 1) / 2];
    let mut role_count = 1usize;

    let pair_index = |i: usize, j: usize| -> usize {
        debug_assert!(i < j);
        i * n - i * (i + 1) / 2 + (j - i - 1)
    };

    for iteration in 1.. {
        // Group nodes by (current role, in-neighbor roles, out-neighbor roles).
        let mut groups: HashMap<(u32, Vec<u32>, Vec<u32>), Vec<u32>> = HashMap::new();
        for v in 0..n {
            let mut in_prof: Vec<u32> = g
                .in_neighbors(NodeId::new(v))
                .iter()
                .map(|&u| roles[u.index()])
                .collect();
            in_prof.sort_unstable();
            in_prof.dedup();
            let mut out_prof: Vec<u32> = g
                .out_neighbors(NodeId::new(v))
                .iter()
                .map(|&u| roles[u.index()])
                .collect();
            out_prof.sort_unstable();
            out_prof.dedup();
            groups
                .entry((roles[v], in_prof, out_prof))
                .or_default()
                .push(v as u32);
        }
        if groups.len() == role_count {
            // Refinement only splits, so an unchanged count means an
            // unchanged partition: fixpoint.
            break;
        }

        // Canonical ids: order groups by their smallest member. Nodes were
        // grouped in ascending order, so that is each group's first entry.
        let mut ordered: Vec<Vec<u32>> = groups.into_values().collect();
        ordered.sort_unstable_by_key(|members| members[0]);
        let mut next = vec![0u32; n];
        for (id, members) in ordered.iter().enumerate() {
            for &v in members {
                next[v as usize] = id as u32;
            }
        }

        // Record first-split iterations: pairs that shared a role and no
        // longer do. Grouping members of each old role by new role keeps the
        // scan linear in the number of newly split pairs.
        let mut by_old: HashMap<u32, Vec<u32>> = HashMap::new();
        for v in 0..n {
            by_old.entry(roles[v]).or_default().push(v as u32);
        }
        for members in by_old.values() {
            for (x, &i) in members.iter().enumerate() {
                for &j in &members[x + 1..] {
                    if next[i as usize] != next[j as usize] {
                        let idx = pair_index(i as usize, j as usize);
                        debug_assert_eq!(splits[idx], 0);
                        splits[idx] = iteration;
                    }
                }
            }
        }

        role_count = ordered.len();
        roles = next;
        history.push(roles.clone());
        if role_count == n {
            break;
        }
    }

    RolePartition { history, splits, n }
}

/// How a first-split iteration `t` maps to a dissimilarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceRule {
    /// `1 / t`: the default; earliest splits are farthest apart.
    #[default]
    InverseIteration,
    /// `(T - t + 1) / T` for `T` total iterations; same ordering, linear decay.
    RemainingFraction,
}

/// Builds the pairwise dissimilarity matrix from a refinement outcome.
///
/// Nodes sharing their final role are at distance 0; all other pairs get a
/// value that decreases the later they were split apart.
pub fn regular_dissimilarity(p: &RolePartition, rule: DistanceRule) -> DissimilarityMatrix {
    let n = p.node_count();
    let total = p.total_iterations() as f64;
    let mut m = DissimilarityMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some(t) = p.split_iteration(NodeId::new(i), NodeId::new(j)) {
                let d = match rule {
                    DistanceRule::InverseIteration => 1.0 / t as f64,
                    DistanceRule::RemainingFraction => (total - t as f64 + 1.0) / total,
                };
                m.set_pair(i, j, d);
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn graph_from(edges: &[(&str, &str)]) -> DependencyGraph {
        let mut b = GraphBuilder::new();
        for &(u, v) in edges {
            let from = b.ensure_node(u);
            b.mark_internal(from);
            let to = b.ensure_node(v);
            b.mark_internal(to);
            b.add_edge(from, to).unwrap();
        }
        b.build()
    }

    fn roles_as_label_sets(g: &DependencyGraph, p: &RolePartition) -> Vec<Vec<String>> {
        p.role_members()
            .into_iter()
            .map(|ms| ms.into_iter().map(|v| g.label(v).to_owned()).collect())
            .collect()
    }

    #[test]
    fn six_node_tree_settles_into_three_roles() {
        let g = graph_from(&[("a", "b"), ("a", "c"), ("b", "d"), ("b", "e"), ("c", "f")]);
        let p = catrege(&g);
        assert_eq!(
            roles_as_label_sets(&g, &p),
            vec![
                vec!["a".to_owned()],
                vec!["b".to_owned(), "c".to_owned()],
                vec!["d".to_owned(), "e".to_owned(), "f".to_owned()],
            ]
        );
        assert_eq!(p.total_iterations(), 1);
    }

    #[test]
    fn three_node_chain_gets_three_roles() {
        let g = graph_from(&[("u", "v"), ("v", "w")]);
        let p = catrege(&g);
        assert_eq!(p.role_count(), 3);
        assert_eq!(p.total_iterations(), 1);
    }

    #[test]
    fn six_node_chain_splits_middle_pair_at_iteration_three() {
        let g = graph_from(&[
            ("u0", "u1"),
            ("u1", "u2"),
            ("u2", "u3"),
            ("u3", "u4"),
            ("u4", "u5"),
        ]);
        let p = catrege(&g);
        let u2 = g.node_by_label("u2").unwrap();
        let u3 = g.node_by_label("u3").unwrap();
        assert_eq!(p.split_iteration(u2, u3), Some(3));
        assert_eq!(p.total_iterations(), 3);
        let m = regular_dissimilarity(&p, DistanceRule::InverseIteration);
        assert!((m.get(u2.index(), u3.index()) - 1.0 / 3.0).abs() <= 1e-15);
    }

    #[test]
    fn edgeless_graph_keeps_a_single_role() {
        let mut b = GraphBuilder::new();
        for l in ["x", "y", "z"] {
            b.add_node(l).unwrap();
        }
        let p = catrege(&b.build());
        assert_eq!(p.role_count(), 1);
        assert_eq!(p.total_iterations(), 0);
        let m = regular_dissimilarity(&p, DistanceRule::InverseIteration);
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.get(1, 2), 0.0);
    }

    #[test]
    fn fixpoint_is_stable_under_one_more_refinement() {
        let g = graph_from(&[("a", "b"), ("a", "c"), ("b", "d"), ("b", "e"), ("c", "f")]);
        let p = catrege(&g);
        // Re-run the profile computation once by hand on the final roles.
        let roles = p.final_roles();
        let mut profiles: std::collections::HashSet<(u32, Vec<u32>, Vec<u32>)> =
            std::collections::HashSet::new();
        for v in g.node_ids() {
            let mut ip: Vec<u32> = g.in_neighbors(v).iter().map(|&u| roles[u.index()]).collect();
            ip.sort_unstable();
            ip.dedup();
            let mut op: Vec<u32> = g.out_neighbors(v).iter().map(|&u| roles[u.index()]).collect();
            op.sort_unstable();
            op.dedup();
            profiles.insert((roles[v.index()], ip, op));
        }
        assert_eq!(profiles.len(), p.role_count());
    }

    #[test]
    fn refinement_stays_under_node_count() {
        let g = graph_from(&[("a", "b"), ("b", "c"), ("c", "d")]);
        let p = catrege(&g);
        assert!(p.total_iterations() <= g.node_count() - 1);
    }

    #[test]
    fn split_iterations_cover_all_cross_role_pairs() {
        let g = graph_from(&[("a", "b"), ("a", "c"), ("b", "d"), ("b", "e"), ("c", "f")]);
        let p = catrege(&g);
        for i in g.node_ids() {
            for j in g.node_ids() {
                if i >= j {
                    continue;
                }
                let same = p.final_role(i) == p.final_role(j);
                assert_eq!(p.split_iteration(i, j).is_none(), same);
                if let Some(t) = p.split_iteration(i, j) {
                    assert!(t >= 1 && t as usize <= p.total_iterations());
                }
            }
        }
    }

    #[test]
    fn distance_rules_order_pairs_identically() {
        let g = graph_from(&[
            ("u0", "u1"),
            ("u1", "u2"),
            ("u2", "u3"),
            ("u3", "u4"),
            ("u4", "u5"),
        ]);
        let p = catrege(&g);
        let inv = regular_dissimilarity(&p, DistanceRule::InverseIteration);
        let rem = regular_dissimilarity(&p, DistanceRule::RemainingFraction);
        let n = g.node_count();
        for a in 0..n {
            for b in (a + 1)..n {
                for c in 0..n {
                    for d in (c + 1)..n {
                        let cmp_inv = inv.get(a, b).partial_cmp(&inv.get(c, d)).unwrap();
                        let cmp_rem = rem.get(a, b).partial_cmp(&rem.get(c, d)).unwrap();
                        assert_eq!(cmp_inv, cmp_rem, "pairs ({a},{b}) vs ({c},{d})");
                    }
                }
            }
        }
    }

    #[test]
    fn identical_neighborhood_twins_share_a_role() {
        // d and e both have exactly {b} as in-neighbors and nothing out.
        let g = graph_from(&[("a", "b"), ("a", "c"), ("b", "d"), ("b", "e"), ("c", "f")]);
        let p = catrege(&g);
        let d = g.node_by_label("d").unwrap();
        let e = g.node_by_label("e").unwrap();
        assert_eq!(p.final_role(d), p.final_role(e));
    }
}
