use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("index {index} out of range for {what} of size {size}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },

    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    #[error("invalid lattice size: {0}")]
    InvalidLattice(String),

    #[error("invalid alpha: {0}")]
    InvalidAlpha(String),

    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: &'static str, reason: String },

    #[error("{what} needs n = {n} qubits but the limit is {cap}; {hint}")]
    Capacity {
        what: &'static str,
        n: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}
