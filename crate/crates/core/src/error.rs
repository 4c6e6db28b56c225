use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph needs at least {min} vertices, got {n}")]
    TooFewVertices { n: usize, min: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("vertex {index} out of range for a graph with {n} vertices")]
    VertexOutOfRange { index: usize, n: usize },

    #[error("({0}, {1}) is not an edge of the graph")]
    MissingEdge(usize, usize),

    #[error("vertices must be distinct, got {0:?}")]
    RepeatedVertex(Vec<usize>),

    #[error("orientation does not match the graph: {0}")]
    BadOrientation(String),

    #[error("dimension must be at least 2, got {0}")]
    BadDimension(usize),

    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("nodes {i} and {j} are collocated")]
    Collocated { i: usize, j: usize },

    #[error("vector is too close to zero (norm {norm:e})")]
    ZeroVector { norm: f64 },

    #[error("invalid bearing for edge ({i}, {j}): {reason}")]
    InvalidBearing { i: usize, j: usize, reason: String },

    #[error("need at least {min} anchors, got {got}")]
    TooFewAnchors { got: usize, min: usize },

    #[error("there are no followers to localize or control")]
    NoFollowers,

    #[error(
        "network is not bearing localizable: smallest singular value of L_ff is \
         {sigma_min:e} (threshold {threshold:e})"
    )]
    NotLocalizable { sigma_min: f64, threshold: f64 },

    #[error("K_i is singular for follower {follower}")]
    SingularGain { follower: usize },

    #[error("gains must be strictly positive, got {0}")]
    InvalidGains(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("{0}")]
    Unsupported(String),
}
