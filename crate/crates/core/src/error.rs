use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("total dimension {dim} exceeds the configured maximum {max}")]
    Sizing { dim: usize, max: usize },

    #[error("matrix is not Hermitian: max |m - m^†| = {asymmetry:.3e}")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid parameter `{field}`: {reason}")]
    Param { field: String, reason: String },

    #[error("state norm {norm:.3e} is too small to normalize")]
    VanishingNorm { norm: f64 },

    #[error("degenerate projection: subspace weight {weight:.3e}")]
    DegenerateProjection { weight: f64 },

    #[error("integration failed at t = {t} ns: {reason}")]
    Integration { t: f64, reason: String },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Param {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
