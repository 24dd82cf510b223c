//! Role discovery in package dependency networks.
//!
//! This crate finds groups of packages that occupy the same position in a
//! dependency graph — foundational cores everything depends on, popular
//! mid-tier packages, and supplementary leaves. It offers two notions of
//! positional similarity:
//!
//! - **structural**: two packages are similar when they share dependencies,
//!   scored by the cosine of their dependency sets ([`structural`]);
//! - **regular**: two packages are similar when their neighbors play the
//!   same roles, computed by iterative role refinement ([`regular`]).
//!
//! Either notion yields a dissimilarity matrix that is clustered around
//! medoids ([`clustering`]) with the cluster count chosen by silhouette
//! width, then summarized as a blockmodel, a planar embedding, and per-
//! cluster role labels ([`report`]). Large graphs are handled by seeded
//! random-walk sampling ([`sampling`]) and an optional descendant closure
//! ([`closure`]). The [`pipeline`] module ties the stages together behind
//! one reproducible configuration.
//!
//! ```
//! use deproles::graph::GraphBuilder;
//! use deproles::pipeline::{run_pipeline, RunConfig};
//!
//! // a depends on b and c; b on d and e; c on f.
//! let mut b = GraphBuilder::new();
//! let ids: Vec<_> = ["a", "b", "c", "d", "e", "f"]
//!     .iter()
//!     .map(|l| b.add_node(*l).unwrap())
//!     .collect();
//! for (from, to) in [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5)] {
//!     b.add_edge(ids[from], ids[to]).unwrap();
//! }
//! let g = b.build();
//!
//! let mut cfg = RunConfig::regular();
//! cfg.sample = false; // analyze the whole graph
//! let summary = run_pipeline(&g, &cfg).unwrap();
//! assert_eq!(summary.samples[0].best_k, Some(3));
//! ```

pub mod error;
pub mod graph;
pub mod matrix;
pub mod ingest;
pub mod sampling;
pub mod closure;
pub mod structural;
pub mod regular;
pub mod clustering;
pub mod report;
pub mod synth;
pub mod pipeline;

pub use error::{Error, Result};
pub use graph::{DependencyGraph, Direction, GraphBuilder, NodeId};
pub use matrix::DissimilarityMatrix;
pub use pipeline::{run_pipeline, PipelineKind, RunConfig, RunSummary};
