//! Synthetic dependency networks with planted roles.
//!
//! Generates three-tier graphs — core packages that everything depends on,
//! mid-tier packages depending on several cores, and leaf packages depending
//! on cores and sometimes mids — for benchmarking and end-to-end testing.
//! Generation is deterministic for a given spec.

use rand::seq::index::sample as index_sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{DependencyGraph, GraphBuilder};

/// Parameters for the planted-role generator.
#[derive(Debug, Clone)]
pub struct PlantedSpec {
    /// Number of core packages (depend on nothing).
    pub cores: usize,
    /// Number of mid-tier packages (depend on cores).
    pub mids: usize,
    /// Number of leaf packages (depend on cores and sometimes mids).
    pub leaves: usize,
    /// Minimum core dependencies per mid (inclusive).
    pub mid_core_min: usize,
    /// Maximum core dependencies per mid (inclusive).
    pub mid_core_max: usize,
    /// Core dependencies per leaf.
    pub leaf_core_deps: usize,
    /// Probability that a leaf also depends on mids.
    pub leaf_mid_prob: f64,
    /// Mid dependencies per leaf, when it has any.
    pub leaf_mid_deps: usize,
    /// RNG seed.
    pub seed: u64,
}

impl PlantedSpec {
    /// Small three-tier network: 10 cores, 40 mids, 450 leaves.
    pub fn small(seed: u64) -> Self {
        PlantedSpec {
            cores: 10,
            mids: 40,
            leaves: 450,
            mid_core_min: 5,
            mid_core_max: 9,
            leaf_core_deps: 1,
            leaf_mid_prob: 0.5,
            leaf_mid_deps: 1,
            seed,
        }
    }

    /// Thousand-node network with roughly eight thousand edges.
    pub fn large(seed: u64) -> Self {
        PlantedSpec {
            cores: 40,
            mids: 200,
            leaves: 760,
            mid_core_min: 8,
            mid_core_max: 12,
            leaf_core_deps: 4,
            leaf_mid_prob: 1.0,
            leaf_mid_deps: 4,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.cores == 0 {
            return Err(Error::InvalidParameter("need at least one core".into()));
        }
        if self.mid_core_min > self.mid_core_max {
            return Err(Error::InvalidParameter(format!(
                "mid core range {}..={} is empty",
                self.mid_core_min, self.mid_core_max
            )));
        }
        if self.mids > 0 && (self.mid_core_min == 0 || self.mid_core_max > self.cores) {
            return Err(Error::InvalidParameter(format!(
                "mid core range {}..={} outside 1..={}",
                self.mid_core_min, self.mid_core_max, self.cores
            )));
        }
        if self.leaves > 0 && (self.leaf_core_deps == 0 || self.leaf_core_deps > self.cores) {
            return Err(Error::InvalidParameter(format!(
                "leaf core count {} outside 1..={}",
                self.leaf_core_deps, self.cores
            )));
        }
        if !(0.0..=1.0).contains(&self.leaf_mid_prob) {
            return Err(Error::InvalidParameter(format!(
                "leaf mid probability {} outside [0, 1]",
                self.leaf_mid_prob
            )));
        }
        if self.leaves > 0 && self.leaf_mid_prob > 0.0 {
            if self.mids == 0 || self.leaf_mid_deps == 0 || self.leaf_mid_deps > self.mids {
                return Err(Error::InvalidParameter(format!(
                    "leaf mid count {} outside 1..={}",
                    self.leaf_mid_deps, self.mids
                )));
            }
        }
        Ok(())
    }
}

/// Generates a three-tier dependency graph with planted roles.
///
/// Nodes are labeled `core000…`, `mid000…`, `leaf000…` in that id order.
/// Each mid depends on a uniform-random number of distinct cores within the
/// configured range; each leaf depends on `leaf_core_deps` distinct cores
/// and, with probability `leaf_mid_prob`, on `leaf_mid_deps` distinct mids.
pub fn planted_roles(spec: &PlantedSpec) -> Result<DependencyGraph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut b = GraphBuilder::new();
    let mut cores = Vec::with_capacity(spec.cores);
    for i in 0..spec.cores {
        cores.push(b.add_node(format!("core{i:03}"))?);
    }
    let mut mids = Vec::with_capacity(spec.mids);
    for i in 0..spec.mids {
        mids.push(b.add_node(format!("mid{i:03}"))?);
    }
    let mut leaves = Vec::with_capacity(spec.leaves);
    for i in 0..spec.leaves {
        leaves.push(b.add_node(format!("leaf{i:03}"))?);
    }

    for &m in &mids {
        let deps = rng.gen_range(spec.mid_core_min..=spec.mid_core_max);
        for pick in index_sample(&mut rng, spec.cores, deps) {
            b.add_edge(m, cores[pick])?;
        }
    }
    for &l in &leaves {
        for pick in index_sample(&mut rng, spec.cores, spec.leaf_core_deps) {
            b.add_edge(l, cores[pick])?;
        }
        if spec.leaf_mid_prob > 0.0 && rng.gen::<f64>() < spec.leaf_mid_prob {
            for pick in index_sample(&mut rng, spec.mids, spec.leaf_mid_deps) {
                b.add_edge(l, mids[pick])?;
            }
        }
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Direction;

    #[test]
    fn generation_is_deterministic() {
        let spec = PlantedSpec::small(7);
        let g1 = planted_roles(&spec).unwrap();
        let g2 = planted_roles(&spec).unwrap();
        assert_eq!(g1.node_count(), g2.node_count());
        assert_eq!(g1.edge_count(), g2.edge_count());
        for v in g1.node_ids() {
            assert_eq!(g1.out_neighbors(v), g2.out_neighbors(v));
        }
    }

    #[test]
    fn tiers_have_the_planted_shape() {
        let spec = PlantedSpec::small(3);
        let g = planted_roles(&spec).unwrap();
        assert_eq!(g.node_count(), 500);
        for v in g.node_ids() {
            let label = g.label(v);
            let (din, dout) = (g.degree(v, Direction::In), g.degree(v, Direction::Out));
            if label.starts_with("core") {
                assert_eq!(dout, 0, "{label} must not depend on anything");
                assert!(din > 0, "{label} should have dependents");
            } else if label.starts_with("mid") {
                assert!((spec.mid_core_min..=spec.mid_core_max).contains(&dout));
            } else {
                assert!(dout == 1 || dout == 2, "{label} out-degree {dout}");
                assert_eq!(din, 0);
            }
        }
    }

    #[test]
    fn seeds_vary_the_wiring() {
        let g1 = planted_roles(&PlantedSpec::small(1)).unwrap();
        let g2 = planted_roles(&PlantedSpec::small(2)).unwrap();
        let differs = g1
            .node_ids()
            .any(|v| g1.out_neighbors(v) != g2.out_neighbors(v));
        assert!(differs);
    }

    #[test]
    fn large_spec_hits_the_advertised_scale() {
        let g = planted_roles(&PlantedSpec::large(11)).unwrap();
        assert_eq!(g.node_count(), 1000);
        // 200 mids x 8..=12 cores + 760 leaves x (4 + 4) edges.
        assert!(g.edge_count() >= 200 * 8 + 760 * 8);
        assert!(g.edge_count() <= 200 * 12 + 760 * 8);
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let mut spec = PlantedSpec::small(0);
        spec.mid_core_max = 11;
        assert!(planted_roles(&spec).is_err());
        let mut spec = PlantedSpec::small(0);
        spec.leaf_mid_prob = 1.5;
        assert!(planted_roles(&spec).is_err());
        let mut spec = PlantedSpec::small(0);
        spec.cores = 0;
        assert!(planted_roles(&spec).is_err());
    }
}
