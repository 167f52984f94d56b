use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(
        "matrix is numerically singular (smallest singular value {smallest:e}, norm {norm:e})"
    )]
    SingularMatrix { smallest: f64, norm: f64 },

    #[error("operator is not invertible: {0}")]
    NotInvertible(String),

    #[error("gramian mismatch in `{check}`: residual {residual:e} exceeds tolerance {tol:e}")]
    GramianMismatch {
        check: String,
        residual: f64,
        tol: f64,
    },

    #[error("dimension {dim} is smaller than the isometry rank {rank}")]
    DimensionTooSmall { dim: usize, rank: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("point outside the domain: {0}")]
    OutsideDomain(String),

    #[error("pole at input: |1 - s1 z / 2| = {0:e}")]
    PoleAtInput(f64),

    #[error("parameter is not unimodular: |w| = {0}")]
    NotUnimodular(f64),

    #[error("degenerate denominator: |q1| = {0} >= 2")]
    DegenerateDenominator(f64),

    #[error("invalid skew parameter r = {0}; expected 0 < r < 1")]
    InvalidSkew(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("insufficient samples: span rank {rank} equals sample count {samples}")]
    InsufficientSamples { rank: usize, samples: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
