use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input contains non-finite entries")]
    NonFinite,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("invalid exponent {0}: must lie in [1, inf]")]
    InvalidExponent(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("{operation} requires {requirement}")]
    Regime {
        operation: &'static str,
        requirement: &'static str,
    },

    #[error("inconsistent bounds: lower {lower} exceeds upper {upper}")]
    Inconsistent { lower: f64, upper: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
