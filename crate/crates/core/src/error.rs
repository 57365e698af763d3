use alloc::string::String;

/// Everything that can go wrong inside the core crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range (graph has {n} vertices)")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graph has {n} vertices, this operation allows at most {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no edges")]
    NoEdges,
    #[error("bad pattern name: {0}")]
    BadPattern(String),
    #[error("invalid elimination tree: {0}")]
    InvalidElimTree(String),
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("search budget too large: {0}")]
    Infeasible(String),
    #[error("no witness within budget for {0}")]
    NoWitness(String),
    #[error("constraint not anchored: {0}")]
    UnanchoredConstraint(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = core::result::Result<T, Error>;
