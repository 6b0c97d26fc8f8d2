use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("grid too coarse: nx={nx}, ny={ny} (both must be at least 4)")]
    GridTooCoarse { nx: usize, ny: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("solver diverged in {stage}: residual {residual:.3e}")]
    SolverDiverged { stage: &'static str, residual: f64 },

    #[error("eigensolver did not converge: {0}")]
    NonconvergentEigen(String),

    #[error("rank-deficient family: vector {index} is linearly dependent on its predecessors")]
    RankDeficient { index: usize },

    #[error("forcing support radius {radius} exceeds the smallest truncation n={n_min}")]
    ForcingSupport { radius: f64, n_min: usize },

    #[error("trajectories have mismatched timestamps at sample {index}")]
    MismatchedTimestamps { index: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
