use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph is disconnected: vertices {0} and {1} are in different components")]
    DisconnectedGraph(usize, usize),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("subset is empty")]
    EmptySubset,
    #[error("space mismatch: expected {expected} points, found {found}")]
    SpaceMismatch { expected: usize, found: usize },
    #[error("measure has zero total mass")]
    ZeroMass,
    #[error("{what}: size {size} exceeds cap {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("pieces {0} and {1} are closer than the separation parameter")]
    NotDisjointEnough(usize, usize),
    #[error("measure carries mass outside the given pieces (point {0})")]
    MassOutsidePieces(usize),
    #[error("bad cover: {0}")]
    BadCover(String),
    #[error("separation {m} must exceed twice the propagation {propagation}")]
    SeparationTooSmall { m: f64, propagation: f64 },
    #[error("operator is zero")]
    ZeroOperator,
    #[error("no convergence: value lies in [{lower}, {upper}]")]
    NoConvergence { lower: f64, upper: f64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("graph has no positive Laplacian eigenvalue")]
    AllZero,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("infeasible linear program")]
    Infeasible,
    #[error("unbounded linear program")]
    Unbounded,
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed input: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
