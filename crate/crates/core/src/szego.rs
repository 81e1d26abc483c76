//! Matrix spectral factorization on the circle (Wilson's Newton iteration)
//! and the construction of explicit factorization certificates from an
//! analytic candidate.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::interp::{oracle_upper, side_of_angle, AnalyticCandidate, Side};
use crate::linalg::{
    ComplexMatrix, Exponent, HermitianEigen, MatrixTuple, C64, PINV_THRESHOLD,
};
use crate::random::complex_normal;
use crate::variational::{derive_exponents, Factorization};

/// Samples `f(2πj/N)`, `j = 0..N`, of a positive definite function on the
/// circle; `N` is a power of two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFunction {
    pub samples: Vec<(f64, ComplexMatrix)>,
}

impl BoundaryFunction {
    pub fn new(values: Vec<ComplexMatrix>) -> Result<Self> {
        let n = values.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Shape(format!(
                "{n} boundary samples; a power of two is required"
            )));
        }
        let d = values[0].dim();
        let mut samples = Vec::with_capacity(n);
        for (j, m) in values.into_iter().enumerate() {
            if m.dim() != d {
                return Err(Error::Shape(format!("sample {j} is {0}x{0}, expected {d}x{d}", m.dim())));
            }
            if !m.is_finite() {
                return Err(Error::NonFinite);
            }
            let eig = HermitianEigen::new(&m);
            let min = eig.values[0];
            if min <= PINV_THRESHOLD * eig.max_abs() {
                return Err(Error::NotPsd { min_eigenvalue: min });
            }
            samples.push((2.0 * PI * j as f64 / n as f64, m.hermitian_part()));
        }
        Ok(Self { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples[0].1.dim()
    }

    /// Smallest eigenvalue over all samples.
    pub fn min_eigenvalue(&self) -> f64 {
        self.samples
            .iter()
            .map(|(_, m)| HermitianEigen::new(m).values[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Entrywise transpose, which factors as `ΓΓ*` exactly when the
    /// original factors as `Ψ*Ψ` with `Ψ = Γᵀ`.
    pub fn transpose(&self) -> Self {
        Self {
            samples: self.samples.iter().map(|(a, m)| (*a, m.transpose())).collect(),
        }
    }
}

/// `Φ(w) = Σ_{m<N} C_m w^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuterFactor {
    pub coeffs: Vec<ComplexMatrix>,
}

impl OuterFactor {
    pub fn dim(&self) -> usize {
        self.coeffs[0].dim()
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, w: C64) -> ComplexMatrix {
        let d = self.dim();
        let mut acc = DMatrix::<C64>::zeros(d, d);
        for c in self.coeffs.iter().rev() {
            acc *= w;
            acc += c.as_dmatrix();
        }
        ComplexMatrix::from_raw(acc)
    }

    pub fn transpose(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(ComplexMatrix::transpose).collect(),
        }
    }

    /// `sup_j ‖Φ Φ* − f‖_∞ / sup_j ‖f‖_∞` over the samples of `f`.
    pub fn residual(&self, f: &BoundaryFunction) -> f64 {
        let mut err = 0.0_f64;
        let mut scale = 0.0_f64;
        for (angle, m) in &f.samples {
            let phi = self.eval(C64::from_polar(1.0, *angle));
            let diff = &(&phi * &phi.adjoint()) - m;
            err = err.max(diff.spectral_norm());
            scale = scale.max(m.spectral_norm());
        }
        err / scale.max(f64::MIN_POSITIVE)
    }

    /// Winding number of `det Φ` along the circle of the given radius,
    /// sampled at `n_points` points.
    pub fn winding_number(&self, radius: f64, n_points: usize) -> i64 {
        let dets: Vec<C64> = (0..n_points)
            .map(|j| {
                let w = C64::from_polar(radius, 2.0 * PI * j as f64 / n_points as f64);
                determinant(&self.eval(w))
            })
            .collect();
        let mut total = 0.0;
        for j in 0..n_points {
            let a = dets[j];
            let b = dets[(j + 1) % n_points];
            total += (b / a).arg();
        }
        (total / (2.0 * PI)).round() as i64
    }

    /// `min |det Φ|` on the circle of the given radius.
    pub fn min_det_modulus(&self, radius: f64, n_points: usize) -> f64 {
        (0..n_points)
            .map(|j| {
                let w = C64::from_polar(radius, 2.0 * PI * j as f64 / n_points as f64);
                determinant(&self.eval(w)).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn determinant(m: &ComplexMatrix) -> C64 {
    m.as_dmatrix().clone().determinant()
}

/// Result of a factorization attempt.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralFactorization {
    pub factor: OuterFactor,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Winding number of `det Φ` on the unit circle.
    pub winding: i64,
}

/// Entrywise discrete Fourier coefficients `(1/N) Σ_j f_j e^{-imω_j}`, or
/// the inverse synthesis `Σ_m c_m e^{imω_j}`.
fn transform(planner: &mut FftPlanner<f64>, values: &[DMatrix<C64>], forward: bool) -> Vec<DMatrix<C64>> {
    let n = values.len();
    let d = values[0].nrows();
    let fft = if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };
    let mut out = vec![DMatrix::<C64>::zeros(d, d); n];
    let mut buf = vec![C64::new(0.0, 0.0); n];
    let scale = if forward { 1.0 / n as f64 } else { 1.0 };
    for r in 0..d {
        for c in 0..d {
            for (b, v) in buf.iter_mut().zip(values) {
                *b = v[(r, c)];
            }
            fft.process(&mut buf);
            for (o, b) in out.iter_mut().zip(&buf) {
                o[(r, c)] = b * scale;
            }
        }
    }
    out
}

/// Causal projection of a Hermitian-symmetric function given by its
/// coefficients: frequencies `1..cutoff` kept, frequency zero replaced by
/// its strictly upper part plus half its diagonal, everything else dropped.
fn plus_part(coeffs: &mut [DMatrix<C64>], cutoff: usize) {
    let d = coeffs[0].nrows();
    for (m, c) in coeffs.iter_mut().enumerate() {
        if m == 0 {
            for r in 0..d {
                for s in 0..d {
                    if r > s {
                        c[(r, s)] = C64::new(0.0, 0.0);
                    } else if r == s {
                        c[(r, s)] *= 0.5;
                    }
                }
            }
        } else if m >= cutoff {
            c.fill(C64::new(0.0, 0.0));
        }
    }
}

/// Truncates sample values of an analytic function to frequencies below
/// `cutoff`; returns the coefficients and the projected samples.
fn project_analytic(
    planner: &mut FftPlanner<f64>,
    values: &[DMatrix<C64>],
    cutoff: usize,
) -> (Vec<DMatrix<C64>>, Vec<DMatrix<C64>>) {
    let mut coeffs = transform(planner, values, true);
    for c in coeffs.iter_mut().skip(cutoff) {
        c.fill(C64::new(0.0, 0.0));
    }
    let samples = transform(planner, &coeffs, false);
    coeffs.truncate(cutoff);
    (coeffs, samples)
}

fn sample_residual(psi: &[DMatrix<C64>], f: &BoundaryFunction, scale: f64) -> f64 {
    psi.iter()
        .zip(&f.samples)
        .map(|(p, (_, m))| {
            let diff = ComplexMatrix::from_raw(p * p.adjoint() - m.as_dmatrix());
            diff.spectral_norm()
        })
        .fold(0.0, f64::max)
        / scale
}

/// Wilson's iteration for `Φ Φ* = f` with `Φ` analytic, polynomial of
/// degree below `cutoff` and outer.
pub fn wilson_factorize(f: &BoundaryFunction, cutoff: usize, cfg: &Config) -> Result<SpectralFactorization> {
    let n = f.len();
    let d = f.dim();
    if cutoff == 0 || 2 * cutoff > n {
        return Err(Error::OutOfRange(format!(
            "cutoff {cutoff} needs between 1 and {} (half the sample count)",
            n / 2
        )));
    }
    let mut planner = FftPlanner::new();
    let scale = f
        .samples
        .iter()
        .map(|(_, m)| m.spectral_norm())
        .fold(0.0, f64::max);
    let mut mean = ComplexMatrix::zeros(d);
    for (_, m) in &f.samples {
        mean += m;
    }
    let mean = mean.scale_re(1.0 / n as f64);
    let start = HermitianEigen::new(&mean).map(|l| l.max(0.0).sqrt()).into_dmatrix();
    let mut psi: Vec<DMatrix<C64>> = vec![start; n];
    let mut residual = sample_residual(&psi, f, scale);
    let mut best = (residual, psi.clone());
    let mut iterations = 0;
    let identity = DMatrix::<C64>::identity(d, d);
    let mut stalled = 0;
    for _ in 0..cfg.max_iters.min(200) {
        if residual <= cfg.szego_tol * 1e-3 {
            break;
        }
        iterations += 1;
        let mut g = Vec::with_capacity(n);
        for (p, (_, m)) in psi.iter().zip(&f.samples) {
            let inv = p.clone().try_inverse().ok_or(Error::Singular)?;
            g.push(&inv * m.as_dmatrix() * inv.adjoint() + &identity);
        }
        let mut coeffs = transform(&mut planner, &g, true);
        plus_part(&mut coeffs, cutoff);
        let plus = transform(&mut planner, &coeffs, false);
        let mut tau = 1.0;
        let mut next = None;
        for _ in 0..12 {
            let candidate: Vec<DMatrix<C64>> = psi
                .iter()
                .zip(&plus)
                .map(|(p, q)| p * (&identity * C64::new(1.0 - tau, 0.0) + q * C64::new(tau, 0.0)))
                .collect();
            let (_, projected) = project_analytic(&mut planner, &candidate, cutoff);
            let invertible = projected.iter().all(|p| {
                let det = p.clone().determinant().norm();
                det.is_finite() && det > 1e-14 * scale.powf(d as f64 / 2.0)
            });
            if invertible {
                next = Some(projected);
                break;
            }
            tau *= 0.5;
        }
        let Some(next) = next else {
            break;
        };
        psi = next;
        let r = sample_residual(&psi, f, scale);
        if r < best.0 * (1.0 - 1e-3) {
            stalled = 0;
        } else {
            stalled += 1;
        }
        if r < best.0 {
            best = (r, psi.clone());
        }
        residual = r;
        if stalled >= 5 {
            break;
        }
    }
    let (coeffs, _) = project_analytic(&mut planner, &best.1, cutoff);
    let factor = OuterFactor {
        coeffs: coeffs.into_iter().map(ComplexMatrix::from_raw).collect(),
    };
    let residual = factor.residual(f);
    let winding = factor.winding_number(1.0, 4 * n);
    Ok(SpectralFactorization {
        converged: residual <= cfg.szego_tol && winding == 0,
        factor,
        residual,
        iterations,
        winding,
    })
}

/// Samples `Q(w)Q(w)* + δI` for a random matrix polynomial `Q` of the given
/// degree, a positive definite trigonometric polynomial of that degree.
pub fn random_trig_boundary<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    degree: usize,
    delta: f64,
    n_samples: usize,
) -> Result<BoundaryFunction> {
    let q: Vec<DMatrix<C64>> = (0..=degree)
        .map(|_| DMatrix::from_fn(dim, dim, |_, _| complex_normal(rng)))
        .collect();
    let values = (0..n_samples)
        .map(|j| {
            let w = C64::from_polar(1.0, 2.0 * PI * j as f64 / n_samples as f64);
            let mut acc = DMatrix::<C64>::zeros(dim, dim);
            for c in q.iter().rev() {
                acc *= w;
                acc += c;
            }
            let m = &acc * acc.adjoint() + DMatrix::<C64>::identity(dim, dim) * C64::new(delta, 0.0);
            ComplexMatrix::from_raw(m).hermitian_part()
        })
        .collect();
    BoundaryFunction::new(values)
}

/// Factorization with the cutoff doubled from `cfg.cutoff` until the
/// residual target is met or `cfg.max_cutoff` is reached; the sampling
/// density follows the cutoff.
pub fn adaptive_factorize(
    sample: impl Fn(usize) -> Result<BoundaryFunction>,
    cfg: &Config,
) -> Result<(SpectralFactorization, BoundaryFunction)> {
    let mut cutoff = cfg.cutoff.max(1).next_power_of_two();
    let mut best: Option<(SpectralFactorization, BoundaryFunction)> = None;
    loop {
        let f = sample(2 * cutoff)?;
        let fact = wilson_factorize(&f, cutoff, cfg)?;
        let done = fact.converged;
        if best.as_ref().is_none_or(|(b, _)| fact.residual < b.residual || !b.converged && done) {
            best = Some((fact, f));
        }
        if done || cutoff * 2 > cfg.max_cutoff {
            break;
        }
        cutoff *= 2;
    }
    Ok(best.expect("at least one cutoff"))
}

/// An explicit factorization built from an analytic candidate, with the
/// diagnostics of the spectral factorizations behind it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub factorization: Factorization,
    /// Certified boundary maximum of the candidate.
    pub boundary_max: f64,
    /// `objective / boundary_max − 1`.
    pub eta: f64,
    pub epsilon: f64,
    /// Relative residuals of `ΦΦ* = A²` and `Ψ*Ψ = B²` on the samples.
    pub residual_a: f64,
    pub residual_b: f64,
    pub winding_a: i64,
    pub winding_b: i64,
    pub cutoff: usize,
    /// Largest eigenvalue of `Σ u_k* u_k` (column side) and `Σ v_k v_k*`
    /// (row side) over the samples.
    pub contraction: f64,
    /// Relative reconstruction error of `a y_k b` against `x`.
    pub reconstruction_error: f64,
    pub converged: bool,
}

struct BoundaryData {
    /// `A(w)²`, `B(w)²`.
    a_sq: Vec<ComplexMatrix>,
    b_sq: Vec<ComplexMatrix>,
    contraction: f64,
}

/// Boundary data of the normalized candidate `G = F / ρ` at `n` equispaced
/// disk angles: `X = (ε + Gram)^{1/2}` per side, `A² = 1` on the column
/// side and `X^{2−p}` on the row side, `B²` the other way round. The two
/// samples adjacent to each arc junction are replaced by their average.
fn boundary_data(cand: &AnalyticCandidate, rho: f64, p: Exponent, eps: f64, n: usize) -> Result<BoundaryData> {
    let d = cand.base().dim();
    let pv = p.value();
    let mut a_sq = Vec::with_capacity(n);
    let mut b_sq = Vec::with_capacity(n);
    let mut sides = Vec::with_capacity(n);
    let mut contraction = 0.0_f64;
    for j in 0..n {
        let angle = 2.0 * PI * j as f64 / n as f64;
        let side = side_of_angle(cand.theta, angle);
        let g = cand.eval_disk(C64::from_polar(1.0, angle)).scale_re(1.0 / rho);
        let gram = match side {
            Side::Column => g.column_gram(),
            Side::Row => g.row_gram(),
        };
        let reg = &gram + &ComplexMatrix::identity(d).scale_re(eps);
        let eig = HermitianEigen::new(&reg);
        // Σ u_k* u_k = X⁻¹ Gram X⁻¹
        let x_inv = eig.map(|l| 1.0 / l.max(eps).sqrt());
        let contr = &(&x_inv * &gram) * &x_inv;
        contraction = contraction.max(HermitianEigen::new(&contr).values[d - 1]);
        let x_pow = eig.map(|l| l.max(eps).powf((2.0 - pv) / 2.0));
        let one = ComplexMatrix::identity(d);
        match side {
            Side::Column => {
                a_sq.push(one);
                b_sq.push(x_pow);
            }
            Side::Row => {
                a_sq.push(x_pow);
                b_sq.push(one);
            }
        }
        sides.push(side);
    }
    for j in 0..n {
        let k = (j + 1) % n;
        if sides[j] != sides[k] {
            for data in [&mut a_sq, &mut b_sq] {
                let avg = (&data[j] + &data[k]).scale_re(0.5);
                data[j] = avg.clone();
                data[k] = avg;
            }
        }
    }
    Ok(BoundaryData {
        a_sq,
        b_sq,
        contraction,
    })
}

/// Converts an analytic candidate into an explicit factorization
/// `x_k = a y_k b` with `a = Φ(θ)`, `b = Ψ(θ)` and
/// `y_k = Φ(θ)⁻¹ x_k Ψ(θ)⁻¹`, for `p ≤ 2`.
pub fn certificate_from_candidate(cand: &AnalyticCandidate, p: Exponent, cfg: &Config) -> Result<Certificate> {
    let theta = cand.theta;
    let ex = derive_exponents(p, theta)?;
    if !ex.is_inf_regime() {
        return Err(Error::Regime {
            operation: "build_certificate",
            requirement: "p <= 2",
        });
    }
    let x = cand.base();
    let rho = cand.certified_max(cfg.samples, 4, p)?;
    if rho == 0.0 {
        return Err(Error::OutOfRange("the zero tuple has no certificate".into()));
    }
    let eps = cfg.epsilon;
    let contraction = std::cell::Cell::new(0.0_f64);
    let (fa, _) = adaptive_factorize(
        |n| {
            let data = boundary_data(cand, rho, p, eps, n)?;
            contraction.set(contraction.get().max(data.contraction));
            BoundaryFunction::new(data.a_sq)
        },
        cfg,
    )?;
    let (fb, _) = adaptive_factorize(
        |n| {
            let data = boundary_data(cand, rho, p, eps, n)?;
            BoundaryFunction::new(data.b_sq).map(|f| f.transpose())
        },
        cfg,
    )?;
    // θ sits at the center of the disk; y absorbs the normalization by ρ.
    let a = fa.factor.eval(C64::new(0.0, 0.0));
    let b = fb.factor.transpose().eval(C64::new(0.0, 0.0));
    let a_inv = a.inverse()?;
    let b_inv = b.inverse()?;
    let ys = x.sandwich(&a_inv, &b_inv);
    let factorization = Factorization::new(a, ys, b, &ex)?;
    let reconstruction_error = factorization.reconstruction_error(x)?;
    let objective = factorization.objective;
    Ok(Certificate {
        eta: objective / rho - 1.0,
        boundary_max: rho,
        epsilon: eps,
        residual_a: fa.residual,
        residual_b: fb.residual,
        winding_a: fa.winding,
        winding_b: fb.winding,
        cutoff: fa.factor.cutoff().max(fb.factor.cutoff()),
        contraction: contraction.get(),
        reconstruction_error,
        converged: fa.converged && fb.converged,
        factorization,
    })
}

/// Runs the analytic-candidate oracle and converts its optimizer into a
/// certificate.
pub fn build_certificate(x: &MatrixTuple, p: Exponent, theta: f64, cfg: &Config) -> Result<Certificate> {
    let ex = derive_exponents(p, theta)?;
    if !ex.is_inf_regime() {
        return Err(Error::Regime {
            operation: "build_certificate",
            requirement: "p <= 2",
        });
    }
    let upper = oracle_upper(x, p, theta, cfg.degree, cfg.samples, cfg)?;
    certificate_from_candidate(&upper.candidate, p, cfg)
}
