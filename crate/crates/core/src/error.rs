//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by graph construction, file ingestion, and the analysis stages.
#[derive(Debug, Error)]
pub enum Error {
    /// A node label was registered twice.
    #[error("duplicate node label {0:?}")]
    DuplicateLabel(String),

    /// An edge endpoint does not exist in the graph.
    #[error("node id {0} is out of range for a graph with {1} nodes")]
    NodeOutOfRange(usize, usize),

    /// Self-dependencies are not representable.
    #[error("self-loop on node {0:?} rejected")]
    SelfLoop(String),

    /// An operation that needs at least one node received none.
    #[error("empty node set: {0}")]
    EmptyNodeSet(&'static str),

    /// A text input line could not be parsed.
    #[error("{path}:{line}: {reason}")]
    MalformedLine {
        path: String,
        line: usize,
        reason: String,
    },

    /// A JSON registry document was structurally invalid.
    #[error("registry {path}: {reason}")]
    MalformedRegistry { path: String, reason: String },

    /// Matrix entries violated symmetry, range, or diagonal requirements.
    #[error("invalid dissimilarity matrix: {0}")]
    InvalidMatrix(String),

    /// A similarity edge referenced an index outside the matrix.
    #[error("similarity edge index {0} is out of range for a {1}-node matrix")]
    EdgeOutOfRange(usize, usize),

    /// A requested parameter was outside its legal range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Cosine similarity is undefined for nodes without outgoing edges.
    #[error("node {0:?} has no outgoing edges; cosine similarity is undefined")]
    ZeroOutDegree(String),

    /// Reachability augmentation would exceed the configured edge budget.
    #[error("closure would exceed the edge budget of {budget} edges; sample the graph first")]
    ClosureBudget { budget: u64 },

    /// Pair enumeration around one node would exceed the configured budget.
    #[error(
        "node {label:?} has {predecessors} predecessors ({pairs} pairs), over the per-node \
         pair budget of {budget}; sample the graph first or raise the budget"
    )]
    PairBudget {
        label: String,
        predecessors: usize,
        pairs: u64,
        budget: u64,
    },

    /// The graph is larger than the configured cap for the iterative role refinement.
    #[error(
        "graph has {nodes} nodes, over the refinement cap of {cap}; \
         pass an explicit override to proceed"
    )]
    NodeCapExceeded { nodes: usize, cap: usize },

    /// Silhouette width needs at least two clusters.
    #[error("silhouette is undefined for a single cluster")]
    SilhouetteUndefined,

    /// A k-medoids parameter was out of range.
    #[error("invalid cluster count k={k} for {n} nodes")]
    InvalidK { k: usize, n: usize },

    /// A k-sweep range was empty or out of bounds.
    #[error("invalid k range [{0}, {1}]")]
    InvalidKRange(usize, usize),

    /// Underlying I/O failure.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// JSON serialization or deserialization failure.
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wraps an I/O error with the path it occurred on.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
