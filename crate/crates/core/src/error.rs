use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: {left} points vs {right} points")]
    SizeMismatch { left: usize, right: usize },

    #[error("point {point} out of range for a set of {size} points")]
    PointOutOfRange { point: usize, size: usize },

    #[error("image array is not a bijection")]
    NotABijection,

    #[error("partial map is not injective (image {0} repeated)")]
    NotInjective(usize),

    #[error("point {0} appears twice in the domain")]
    DuplicateDomainPoint(usize),

    #[error("a point set needs at least one point")]
    EmptyPointSet,

    #[error("duplicate point name `{0}`")]
    DuplicateName(String),

    #[error("element cap of {cap} exceeded while enumerating the closure")]
    CapExceeded { cap: usize },

    #[error("graph has {nodes} nodes; this routine supports at most {max}")]
    TooLarge { nodes: usize, max: usize },

    #[error("topology is disconnected: no path between {a} and {b}")]
    Disconnected { a: usize, b: usize },

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid task graph: {0}")]
    InvalidTaskGraph(String),

    #[error("invalid task symmetry: {0}")]
    InvalidTaskSymmetry(String),

    #[error("invalid mapping: {0}")]
    InvalidMapping(String),

    #[error("no cost entry for task `{task}` on PE type `{pe_type}`")]
    MissingCost { task: String, pe_type: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed document: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
