use thiserror::Error;

/// Errors raised by tensor arithmetic, the manifold geometry and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("mode {mode} out of range for a tensor of order {order}")]
    ModeOutOfRange { mode: usize, order: usize },

    #[error("multi-index {index:?} out of bounds for dims {dims:?}")]
    IndexOutOfBounds { index: Vec<usize>, dims: Vec<usize> },

    #[error("tensor order must be at least 2, got {0}")]
    OrderTooSmall(usize),

    #[error("sampling set is empty")]
    EmptySampling,

    #[error("sampling set is not strictly sorted: entry {position} repeats or precedes its predecessor")]
    UnsortedSampling { position: usize },

    #[error("rank {rank} in mode {mode} exceeds the admissible bound {bound}")]
    RankTooLarge { mode: usize, rank: usize, bound: usize },

    #[error("factor matrix in mode {mode} is not orthonormal (deviation {deviation:e})")]
    NotOrthonormal { mode: usize, deviation: f64 },

    #[error("factor matrix in mode {mode} is rank deficient")]
    RankDeficientFactor { mode: usize },

    #[error("core matricization in mode {mode} is rank deficient (sigma_min/sigma_max = {ratio:e})")]
    SingularCore { mode: usize, ratio: f64 },

    #[error("truncation in mode {mode} drops rank (sigma_r/sigma_max = {ratio:e})")]
    RankDrop { mode: usize, ratio: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("line search failed: step underflow")]
    LineSearchFailure,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
