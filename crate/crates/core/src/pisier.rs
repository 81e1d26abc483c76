//! The superoperator `y ↦ Σ x_k* y x_k` and its norm on `S_p`, and the
//! comparison `α_{∞,θ}(x)² = ‖Σ L_{x_k*} R_{x_k}‖_{B(S_p)}` with `p = 1/θ`.
//!
//! Matrices act on column-stacked vectors: `vec(a y b) = (bᵀ ⊗ a) vec(y)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{polar, schatten_norm, ComplexMatrix, Exponent, HermitianEigen, MatrixTuple};
use crate::random::{gaussian_matrix, random_psd, seeded_rng};
use crate::variational::{alpha_sup, EstimateKind, NormEstimate};

/// `T(y) = Σ x_k* y x_k`, kept with its Kraus tuple so the endpoint norms
/// stay exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Superoperator {
    pub dim: usize,
    /// `d² × d²`, column-stacking convention.
    pub matrix: ComplexMatrix,
    pub kraus: MatrixTuple,
}

pub fn build_superoperator(x: &MatrixTuple) -> Superoperator {
    let d = x.dim();
    let mut acc = ComplexMatrix::zeros(d * d);
    for m in x.iter() {
        acc += &m.transpose().kron(&m.adjoint());
    }
    Superoperator {
        dim: d,
        matrix: acc,
        kraus: x.clone(),
    }
}

impl Superoperator {
    pub fn apply(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        if y.dim() != self.dim {
            return Err(Error::Shape(format!(
                "superoperator on {0}x{0} matrices applied to a {1}x{1} matrix",
                self.dim,
                y.dim()
            )));
        }
        let v = DVector::from_vec(y.vec());
        let out = self.matrix.as_dmatrix() * v;
        ComplexMatrix::unvec(self.dim, out.as_slice())
    }

    /// Trace adjoint `y ↦ Σ x_k y x_k*`.
    pub fn adjoint(&self) -> Self {
        build_superoperator(&self.kraus.adjoint())
    }

    /// Choi matrix `Σ_{ij} E_ij ⊗ T(E_ij)`, read off the matrix by
    /// reshuffling; positive semidefinite exactly when `T` is completely
    /// positive.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim;
        let m = self.matrix.as_dmatrix();
        let c = DMatrix::from_fn(d * d, d * d, |r, s| {
            let (i, a) = (r / d, r % d);
            let (j, c) = (s / d, s % d);
            m[(a + d * c, i + d * j)]
        });
        ComplexMatrix::from_raw(c)
    }
}

fn dual_element(z: &ComplexMatrix, q: f64) -> Result<ComplexMatrix> {
    let (u, h) = polar(z)?;
    let nz = schatten_norm(z, Exponent::Finite(q))?;
    if nz == 0.0 {
        return Ok(ComplexMatrix::zeros(z.dim()));
    }
    let hp = HermitianEigen::new(&h).map(|l| (l.max(0.0) / nz).powf(q - 1.0));
    Ok(&u * &hp)
}

/// `‖T‖_{B(S_p)}`: exact at `p ∈ {1, 2, ∞}`, a lower bound from nonlinear
/// power iteration otherwise.
pub fn superop_norm(t: &Superoperator, p: Exponent, cfg: &Config) -> Result<NormEstimate> {
    let d = t.dim;
    match p {
        Exponent::Infinite => {
            let v = t.apply(&ComplexMatrix::identity(d))?.spectral_norm();
            return Ok(NormEstimate::exact(v, None));
        }
        Exponent::Finite(1.0) => {
            let v = t.adjoint().apply(&ComplexMatrix::identity(d))?.spectral_norm();
            return Ok(NormEstimate::exact(v, None));
        }
        Exponent::Finite(2.0) => {
            return Ok(NormEstimate::exact(t.matrix.spectral_norm(), None));
        }
        Exponent::Finite(_) => {}
    }
    let q = p.value();
    let q_conj = p.conjugate().value();
    let adj = t.adjoint();
    let mut rng = seeded_rng(cfg.seed);
    let mut starts = vec![ComplexMatrix::identity(d)];
    for k in 0..cfg.restarts {
        starts.push(if k % 2 == 0 {
            random_psd(&mut rng, d)
        } else {
            gaussian_matrix(&mut rng, d)
        });
    }
    let mut best = 0.0_f64;
    let mut best_converged = false;
    let mut iterations = 0;
    for y0 in starts {
        let mut y = y0.scale_re(1.0 / schatten_norm(&y0, p)?);
        let mut value = 0.0_f64;
        let mut converged = false;
        for _ in 0..cfg.max_iters {
            iterations += 1;
            let z = t.apply(&y)?;
            let nz = schatten_norm(&z, p)?;
            if nz == 0.0 {
                converged = true;
                break;
            }
            let prev = value;
            value = nz;
            if (value - prev).abs() <= cfg.tol * value {
                converged = true;
                break;
            }
            let w = dual_element(&z, q)?;
            let s = adj.apply(&w)?;
            if s.max_abs() == 0.0 {
                converged = true;
                break;
            }
            y = dual_element(&s, q_conj)?;
        }
        if value > best {
            best = value;
            best_converged = converged;
        }
    }
    Ok(NormEstimate {
        value: best,
        kind: EstimateKind::Lower,
        witness: None,
        iterations,
        converged: best_converged,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub theta: f64,
    /// `1/θ`.
    pub p: Exponent,
    pub alpha_squared: f64,
    pub alpha: NormEstimate,
    pub superop: NormEstimate,
    /// `|α² − ‖T‖| / max(α², ‖T‖)`.
    pub deviation: f64,
}

/// Compares `α_{∞,θ}(x)²` with the superoperator norm at `p = 1/θ`.
pub fn corollary_check(x: &MatrixTuple, theta: f64, cfg: &Config) -> Result<CorollaryReport> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::OutOfRange(format!(
            "theta = {theta} must lie strictly between 0 and 1"
        )));
    }
    let p = Exponent::from_recip(theta)?;
    let alpha = alpha_sup(x, Exponent::INFINITY, theta, cfg)?;
    let superop = superop_norm(&build_superoperator(x), p, cfg)?;
    let alpha_squared = alpha.value * alpha.value;
    let scale = alpha_squared.max(superop.value);
    let deviation = if scale > 0.0 {
        (alpha_squared - superop.value).abs() / scale
    } else {
        0.0
    };
    Ok(CorollaryReport {
        theta,
        p,
        alpha_squared,
        alpha,
        superop,
        deviation,
    })
}
