use thiserror::Error;

/// Errors raised by the numerical routines and constructors in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BjError {
    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:e})")]
    NonHermitian { asymmetry: f64 },

    #[error("matrix contains NaN or infinite entries")]
    NonFinite,

    #[error("expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is zero (norm {norm:e})")]
    ZeroMatrix { norm: f64 },

    #[error("algebra element is zero")]
    ZeroElement,

    #[error("vector is zero")]
    ZeroVector,

    #[error("central gauge is not positive definite: {0}")]
    NonPositiveGauge(String),

    #[error("matrix does not belong to the constraint space (residual {residual:e})")]
    NotMember { residual: f64 },

    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),

    #[error("matrix is not of the form x e_n* + e_n y*: {0}")]
    NotInForm(String),

    #[error("invalid block permutation: {0}")]
    SizeViolation(String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("gauge invariant violated: {0}")]
    GaugeViolation(String),

    #[error("map does not preserve rank-one matrices: {0}")]
    NotRankOnePreserving(String),

    #[error("structure fit residual {residual:e} exceeds tolerance")]
    AmbiguousFit { residual: f64 },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
}

impl From<std::io::Error> for BjError {
    fn from(e: std::io::Error) -> Self {
        BjError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, BjError>;
