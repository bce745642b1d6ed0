//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected rank {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("the zero weight is not allowed in a weight set")]
    ZeroWeight,

    #[error("on-wall element: Re {weight}(X) = 0, chamber undefined")]
    OnWall { weight: String },

    #[error("singular evaluation: denominator weight {weight} vanishes at X")]
    SingularEvaluation { weight: String },

    #[error("degenerate action: {0}")]
    DegenerateAction(String),

    #[error("inconsistent sheaf data: {0}")]
    InconsistentSheaf(String),

    #[error("incompatible stratifications: {0}")]
    IncompatibleStratification(String),

    #[error("unsupported sheaf for this operation: {0}")]
    UnsupportedSheaf(String),

    #[error("quadrature grid too small: {got} (minimum {min})")]
    GridTooSmall { got: usize, min: usize },
}
