//! Column and row norms of a tuple, i.e. the norms of `C_p^n[L_p]` and
//! `R_p^n[L_p]`.

use crate::error::Result;
use crate::linalg::{psd_power, schatten_norm, Exponent, MatrixTuple};

/// `‖(Σ x_k* x_k)^{1/2}‖_p`.
pub fn column_norm(x: &MatrixTuple, p: Exponent) -> Result<f64> {
    let root = psd_power(&x.column_gram(), 0.5)?;
    schatten_norm(&root, p)
}

/// `‖(Σ x_k x_k*)^{1/2}‖_p`.
pub fn row_norm(x: &MatrixTuple, p: Exponent) -> Result<f64> {
    let root = psd_power(&x.row_gram(), 0.5)?;
    schatten_norm(&root, p)
}
