//! Complex interpolation norms of column and row spaces over matrix
//! algebras, computed by variational formulas, an analytic-function oracle
//! and a superoperator norm, with spectral-factorization certificates.

pub mod config;
pub mod error;
pub mod interp;
mod lbfgs;
pub mod linalg;
pub mod pisier;
pub mod random;
pub mod szego;
pub mod tuple_norms;
pub mod variational;

pub use config::Config;
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Exponent, MatrixTuple, C64};
