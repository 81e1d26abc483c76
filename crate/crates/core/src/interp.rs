//! The complex interpolation norm of the column/row couple, computed
//! directly: an upper bound by minimizing the boundary maximum over
//! polynomial analytic candidates, and a lower bound by duality.
//!
//! The strip `S = {0 ≤ Re z ≤ 1}` is carried to the closed unit disk by
//! `u = e^{iπz}` (onto the upper half-plane) followed by the Möbius map
//! `w = (u − u_θ)/(u − ū_θ)` with `u_θ = e^{iπθ}`, so `θ ↦ 0`. The line
//! `Re z = 0` lands on the arc of angles `(2πθ, 2π)` and carries the column
//! norm; `Re z = 1` lands on `(0, 2πθ)` and carries the row norm. Seen from
//! the center the second arc has harmonic measure `θ`.

use std::cell::Cell;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::lbfgs;
use crate::linalg::{ComplexMatrix, Exponent, HermitianEigen, MatrixTuple, C64, PINV_THRESHOLD};
use crate::tuple_norms::{column_norm, row_norm};
use crate::variational::{
    alpha_with, derive_exponents, dual_norm_estimate_with, EstimateKind, NormEstimate, Witness,
};

/// Which side of the strip a boundary point comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `Re z = 0`, column norm.
    Column,
    /// `Re z = 1`, row norm.
    Row,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    /// Disk angle in `(0, 2π)`.
    pub angle: f64,
    pub w: C64,
    /// Preimage on the strip boundary.
    pub z: C64,
    pub side: Side,
    /// Harmonic measure at `θ` carried by the sample.
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripMap {
    pub theta: f64,
    pub samples: Vec<BoundarySample>,
}

fn u_theta(theta: f64) -> C64 {
    C64::from_polar(1.0, PI * theta)
}

/// Strip to disk, `θ ↦ 0`.
pub fn strip_to_disk(theta: f64, z: C64) -> C64 {
    let u = (C64::i() * PI * z).exp();
    let ut = u_theta(theta);
    (u - ut) / (u - ut.conj())
}

/// Disk to strip; `w = 1` has no preimage (it is the end `Im z → −∞`).
pub fn disk_to_strip(theta: f64, w: C64) -> C64 {
    let ut = u_theta(theta);
    let u = (ut - w * ut.conj()) / (C64::new(1.0, 0.0) - w);
    // u lies in the closed upper half-plane; fold roundoff below the axis.
    let mut arg = u.arg();
    if arg < -PI / 2.0 {
        arg += 2.0 * PI;
    }
    let arg = arg.clamp(0.0, PI);
    C64::new(arg / PI, -u.norm().ln() / PI)
}

/// Side of the strip boundary whose image contains the disk angle.
pub fn side_of_angle(theta: f64, angle: f64) -> Side {
    let a = angle.rem_euclid(2.0 * PI);
    if a < 2.0 * PI * theta {
        Side::Row
    } else {
        Side::Column
    }
}

/// Disk angles of the two arc junctions.
pub fn junction_angles(theta: f64) -> [f64; 2] {
    [0.0, 2.0 * PI * theta]
}

pub fn strip_disk_map(theta: f64, n_samples: usize) -> Result<StripMap> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::OutOfRange(format!(
            "theta = {theta} must lie strictly between 0 and 1"
        )));
    }
    if n_samples < 16 {
        return Err(Error::OutOfRange(format!(
            "{n_samples} boundary samples; at least 16 are needed"
        )));
    }
    let weight = 1.0 / n_samples as f64;
    let samples = (0..n_samples)
        .map(|j| {
            let angle = 2.0 * PI * (j as f64 + 0.5) * weight;
            let w = C64::from_polar(1.0, angle);
            BoundarySample {
                angle,
                w,
                z: disk_to_strip(theta, w),
                side: side_of_angle(theta, angle),
                weight,
            }
        })
        .collect();
    Ok(StripMap { theta, samples })
}

impl StripMap {
    pub fn forward(&self, z: C64) -> C64 {
        strip_to_disk(self.theta, z)
    }

    pub fn inverse(&self, w: C64) -> C64 {
        disk_to_strip(self.theta, w)
    }

    pub fn side_samples(&self, side: Side) -> impl Iterator<Item = &BoundarySample> {
        self.samples.iter().filter(move |s| s.side == side)
    }

    /// Total weight of the samples on `side`.
    pub fn harmonic_measure(&self, side: Side) -> f64 {
        self.side_samples(side).map(|s| s.weight).sum()
    }
}

/// `F(w) = Σ_m c_m w^m` on the disk with `c_0 = x`, so `F(θ) = x` on the
/// strip.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticCandidate {
    pub theta: f64,
    pub coeffs: Vec<MatrixTuple>,
}

impl AnalyticCandidate {
    pub fn constant(theta: f64, x: &MatrixTuple) -> Self {
        Self {
            theta,
            coeffs: vec![x.clone()],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn base(&self) -> &MatrixTuple {
        &self.coeffs[0]
    }

    pub fn eval_disk(&self, w: C64) -> MatrixTuple {
        let mut acc: Vec<DMatrix<C64>> = self.coeffs[self.degree()]
            .iter()
            .map(|m| m.as_dmatrix().clone())
            .collect();
        for c in self.coeffs[..self.degree()].iter().rev() {
            for (a, m) in acc.iter_mut().zip(c.iter()) {
                *a *= w;
                *a += m.as_dmatrix();
            }
        }
        let d = self.base().dim();
        MatrixTuple::from_raw(d, acc.into_iter().map(ComplexMatrix::from_raw).collect())
    }

    /// The candidate `F(1 − z̄)*` at `1 − θ`, which interpolates `x*`.
    pub fn reflect(&self) -> Self {
        Self {
            theta: 1.0 - self.theta,
            coeffs: self.coeffs.iter().map(MatrixTuple::adjoint).collect(),
        }
    }

    pub fn eval_strip(&self, z: C64) -> MatrixTuple {
        self.eval_disk(strip_to_disk(self.theta, z))
    }

    /// Column or row norm of `F` at a boundary point of the given side.
    pub fn boundary_norm(&self, angle: f64, side: Side, p: Exponent) -> Result<f64> {
        let f = self.eval_disk(C64::from_polar(1.0, angle));
        match side {
            Side::Column => column_norm(&f, p),
            Side::Row => row_norm(&f, p),
        }
    }

    /// Boundary maximum over the samples of `map`.
    pub fn sampled_max(&self, map: &StripMap, p: Exponent) -> Result<f64> {
        let mut best = 0.0_f64;
        for s in &map.samples {
            best = best.max(self.boundary_norm(s.angle, s.side, p)?);
        }
        Ok(best)
    }

    /// Boundary maximum on a grid `refine` times finer than `n_samples`,
    /// including both arc junctions under both norms.
    pub fn certified_max(&self, n_samples: usize, refine: usize, p: Exponent) -> Result<f64> {
        let n = n_samples * refine.max(1);
        let mut best = 0.0_f64;
        for j in 0..n {
            let angle = 2.0 * PI * j as f64 / n as f64;
            best = best.max(self.boundary_norm(angle, side_of_angle(self.theta, angle), p)?);
        }
        for angle in junction_angles(self.theta) {
            best = best.max(self.boundary_norm(angle, Side::Column, p)?);
            best = best.max(self.boundary_norm(angle, Side::Row, p)?);
        }
        Ok(best)
    }

    fn pad(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        let (d, n) = (self.base().dim(), self.base().len());
        while coeffs.len() <= degree {
            coeffs.push(MatrixTuple::zeros(d, n));
        }
        Self {
            theta: self.theta,
            coeffs,
        }
    }
}

/// Refinement factor of the certification grid.
const CERTIFY_REFINE: usize = 4;

/// Smoothing temperatures, relative to the constant-candidate value.
const SMOOTHING: [f64; 5] = [3e-2, 1e-2, 3e-3, 1e-3, 3e-4];

/// Soft-max terms at one boundary point as `(value, h)`: the gradient of
/// the value with respect to `F_k` is `F_k h` on the column side and `h F_k`
/// on the row side.
fn boundary_terms(f: &[DMatrix<C64>], side: Side, p: Exponent, out: &mut Vec<(f64, DMatrix<C64>)>) {
    let d = f[0].nrows();
    let mut g = DMatrix::<C64>::zeros(d, d);
    for m in f {
        match side {
            Side::Column => g += m.adjoint() * m,
            Side::Row => g += m * m.adjoint(),
        }
    }
    let eig = HermitianEigen::new(&ComplexMatrix::from_raw(g));
    let top = eig.max_abs();
    if top == 0.0 {
        out.push((0.0, DMatrix::zeros(d, d)));
        return;
    }
    let cut = PINV_THRESHOLD * top;
    match p {
        Exponent::Infinite => {
            for (i, &l) in eig.values.iter().enumerate() {
                if l <= cut {
                    continue;
                }
                let s = l.sqrt();
                let u = eig.vectors.column(i);
                out.push((s, (u * u.adjoint()) * C64::new(1.0 / s, 0.0)));
            }
        }
        Exponent::Finite(q) => {
            let sum: f64 = eig
                .values
                .iter()
                .map(|&l| if l > cut { l.powf(q / 2.0) } else { 0.0 })
                .sum();
            let norm = sum.powf(1.0 / q);
            let scale = norm.powf(1.0 - q);
            let h = eig.map(|l| if l > cut { scale * l.powf(q / 2.0 - 1.0) } else { 0.0 });
            out.push((norm, h.into_dmatrix()));
        }
    }
}

struct Problem<'a> {
    x: &'a MatrixTuple,
    p: Exponent,
    degree: usize,
    /// `(side, w^m for m = 0..=degree)` per sample.
    points: Vec<(Side, Vec<C64>)>,
}

/// `(norm, sample index, h)` for one boundary norm; its gradient in `F_k`
/// is `F_k h` on the column side and `h F_k` on the row side.
type BoundaryTerm = (f64, usize, DMatrix<C64>);

impl Problem<'_> {
    fn n_params(&self) -> usize {
        let d = self.x.dim();
        2 * self.degree * self.x.len() * d * d
    }

    fn coeffs(&self, v: &[f64]) -> Vec<Vec<DMatrix<C64>>> {
        let d = self.x.dim();
        let n = self.x.len();
        let mut out = Vec::with_capacity(self.degree);
        let mut idx = 0;
        for _ in 0..self.degree {
            let mut tuple = Vec::with_capacity(n);
            for _ in 0..n {
                let mut m = DMatrix::<C64>::zeros(d, d);
                for i in 0..d {
                    for j in 0..d {
                        m[(i, j)] = C64::new(v[idx], v[idx + 1]);
                        idx += 2;
                    }
                }
                tuple.push(m);
            }
            out.push(tuple);
        }
        out
    }

    fn candidate(&self, theta: f64, v: &[f64]) -> AnalyticCandidate {
        let d = self.x.dim();
        let mut coeffs = vec![self.x.clone()];
        for t in self.coeffs(v) {
            coeffs.push(MatrixTuple::from_raw(
                d,
                t.into_iter().map(ComplexMatrix::from_raw).collect(),
            ));
        }
        AnalyticCandidate { theta, coeffs }
    }

    fn encode(&self, cand: &AnalyticCandidate) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.n_params());
        for m in 1..=self.degree {
            if let Some(t) = cand.coeffs.get(m) {
                for mat in t.iter() {
                    for z in mat.to_row_major() {
                        v.push(z.re);
                        v.push(z.im);
                    }
                }
            } else {
                v.extend(std::iter::repeat_n(0.0, 2 * self.x.len() * self.x.dim().pow(2)));
            }
        }
        v
    }

    fn boundary_values(&self, v: &[f64]) -> (Vec<Vec<DMatrix<C64>>>, Vec<BoundaryTerm>) {
        let coeffs = self.coeffs(v);
        let mut values = Vec::with_capacity(self.points.len());
        let mut terms = Vec::with_capacity(self.points.len());
        let mut buf = Vec::new();
        for (j, (side, powers)) in self.points.iter().enumerate() {
            let f: Vec<DMatrix<C64>> = (0..self.x.len())
                .map(|k| {
                    let mut m = self.x.mats()[k].as_dmatrix().clone();
                    for (c, wm) in coeffs.iter().zip(&powers[1..]) {
                        m += &c[k] * *wm;
                    }
                    m
                })
                .collect();
            buf.clear();
            boundary_terms(&f, *side, self.p, &mut buf);
            terms.extend(buf.drain(..).map(|(val, h)| (val, j, h)));
            values.push(f);
        }
        (values, terms)
    }

    /// Hard boundary maximum over the samples.
    fn hard_max(&self, v: &[f64]) -> f64 {
        let (_, terms) = self.boundary_values(v);
        terms.iter().map(|t| t.0).fold(0.0_f64, f64::max)
    }

    /// Soft maximum at temperature `mu` with its gradient; also returns the
    /// hard maximum.
    fn evaluate(&self, v: &[f64], mu: f64, grad: &mut [f64]) -> (f64, f64) {
        let (values, terms) = self.boundary_values(v);
        let vmax = terms.iter().map(|t| t.0).fold(0.0_f64, f64::max);
        let weights: Vec<f64> = terms.iter().map(|t| ((t.0 - vmax) / mu).exp()).collect();
        let total: f64 = weights.iter().sum();
        let value = vmax + mu * total.ln();
        grad.iter_mut().for_each(|g| *g = 0.0);
        let d = self.x.dim();
        let block = 2 * self.x.len() * d * d;
        for ((_, j, h), wt) in terms.iter().zip(&weights) {
            let wt = wt / total;
            if wt < 1e-16 {
                continue;
            }
            let (side, powers) = &self.points[*j];
            let g: Vec<DMatrix<C64>> = values[*j]
                .iter()
                .map(|m| match side {
                    Side::Column => m * h,
                    Side::Row => h * m,
                })
                .collect();
            for (m, w) in powers.iter().enumerate().take(self.degree + 1).skip(1) {
                let c = w.conj() * wt;
                let mut idx = (m - 1) * block;
                for gk in &g {
                    for i in 0..d {
                        for jj in 0..d {
                            let z = gk[(i, jj)] * c;
                            grad[idx] += z.re;
                            grad[idx + 1] += z.im;
                            idx += 2;
                        }
                    }
                }
            }
        }
        (value, vmax)
    }
}

/// Degrees visited by the continuation, ending at `degree`; the path for
/// `degree + 2` extends the path for `degree`.
fn degree_path(degree: usize) -> Vec<usize> {
    let mut path = vec![0];
    let mut m = if degree.is_multiple_of(2) { 2 } else { 1 };
    while m <= degree {
        path.push(m);
        m += 2;
    }
    path
}

/// Result of the analytic-candidate minimization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleUpper {
    pub estimate: NormEstimate,
    pub candidate: AnalyticCandidate,
    /// Boundary maximum of the candidate on the optimization samples.
    pub sampled_value: f64,
}

/// Upper bound on the interpolation norm: the smallest certified boundary
/// maximum found over polynomial candidates of degree ≤ `degree`.
pub fn oracle_upper(
    x: &MatrixTuple,
    p: Exponent,
    theta: f64,
    degree: usize,
    n_samples: usize,
    cfg: &Config,
) -> Result<OracleUpper> {
    if theta > 0.5 {
        // F ↦ F(1 − z̄)* swaps the sides; on the disk it is w ↦ w̄
        let mut out = oracle_upper(&x.adjoint(), p, 1.0 - theta, degree, n_samples, cfg)?;
        out.candidate = out.candidate.reflect();
        out.estimate.witness = Some(Witness::Analytic(out.candidate.clone()));
        return Ok(out);
    }
    let map = strip_disk_map(theta, n_samples)?;
    let mut best = AnalyticCandidate::constant(theta, x);
    let mut best_value = best.certified_max(n_samples, CERTIFY_REFINE, p)?;
    let mut best_sampled = best.sampled_max(&map, p)?;
    let mut iterations = 0;
    let mut converged = true;
    let v0 = best_value;
    if v0 == 0.0 {
        return Ok(OracleUpper {
            estimate: NormEstimate::exact(0.0, Some(Witness::Analytic(best.clone()))),
            candidate: best,
            sampled_value: 0.0,
        });
    }
    for &m in degree_path(degree).iter().skip(1) {
        let points = map
            .samples
            .iter()
            .map(|s| {
                let powers = (0..=m).map(|e| s.w.powu(e as u32)).collect();
                (s.side, powers)
            })
            .collect();
        let problem = Problem {
            x,
            p,
            degree: m,
            points,
        };
        let mut v = problem.encode(&best.pad(m));
        let mut best_here = (problem.hard_max(&v), v.clone());
        for (stage, &rel) in SMOOTHING.iter().enumerate() {
            let mu = rel * v0;
            // hard maximum at the most recently evaluated point, which is
            // the accepted iterate whenever `observe` runs
            let last_hard = Cell::new(f64::INFINITY);
            let out = lbfgs::minimize(
                &mut v,
                cfg.oracle_iters,
                cfg.tol,
                8,
                |v, g| {
                    let (smooth, hard) = problem.evaluate(v, mu, g);
                    last_hard.set(hard);
                    smooth
                },
                |v| {
                    let hard = last_hard.get();
                    if hard < best_here.0 {
                        best_here = (hard, v.to_vec());
                    }
                },
            );
            iterations += out.iterations;
            if stage + 1 == SMOOTHING.len() {
                converged = out.stationary;
            }
        }
        let cand = problem.candidate(theta, &best_here.1);
        let certified = cand.certified_max(n_samples, CERTIFY_REFINE, p)?;
        if certified < best_value {
            best_value = certified;
            best_sampled = best_here.0;
            best = cand;
        }
    }
    let best = best.pad(degree);
    Ok(OracleUpper {
        estimate: NormEstimate {
            value: best_value,
            kind: EstimateKind::Upper,
            witness: Some(Witness::Analytic(best.clone())),
            iterations,
            converged,
        },
        candidate: best,
        sampled_value: best_sampled,
    })
}

/// Lower bound on the interpolation norm through the dual couple:
/// `sup_z |⟨x, z⟩| / α_{p′,θ}(z)`.
pub fn oracle_lower(x: &MatrixTuple, p: Exponent, theta: f64, cfg: &Config) -> Result<NormEstimate> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::OutOfRange(format!(
            "theta = {theta} must lie strictly between 0 and 1"
        )));
    }
    if theta > 0.5 {
        let mut est = oracle_lower(&x.adjoint(), p, 1.0 - theta, cfg)?;
        if let Some(Witness::Dual(z)) = &est.witness {
            est.witness = Some(Witness::Dual(z.adjoint()));
        }
        return Ok(est);
    }
    let ex = derive_exponents(p, theta)?;
    dual_norm_estimate_with(x, &ex, cfg)
}

/// Relative slack allowed between two estimates that should be ordered.
pub const ORDER_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub lower: NormEstimate,
    pub alpha: NormEstimate,
    pub upper: NormEstimate,
    /// `(upper − lower) / upper`.
    pub relative_gap: f64,
    /// Where `α` falls in `[lower, upper]`, as a fraction of the gap.
    pub alpha_position: f64,
}

/// Runs the duality lower bound, `α_{p,θ}` and the analytic-candidate upper
/// bound on the same instance.
pub fn sandwich(x: &MatrixTuple, p: Exponent, theta: f64, cfg: &Config) -> Result<SandwichReport> {
    let ex = derive_exponents(p, theta)?;
    let lower = oracle_lower(x, p, theta, cfg)?;
    let alpha = alpha_with(x, &ex, cfg)?;
    let upper = oracle_upper(x, p, theta, cfg.degree, cfg.samples, cfg)?.estimate;
    if lower.value > upper.value * (1.0 + ORDER_TOL) {
        return Err(Error::Inconsistent {
            lower: lower.value,
            upper: upper.value,
        });
    }
    let gap = upper.value - lower.value;
    let relative_gap = if upper.value > 0.0 { gap / upper.value } else { 0.0 };
    let alpha_position = if gap > 0.0 {
        (alpha.value - lower.value) / gap
    } else {
        0.0
    };
    Ok(SandwichReport {
        lower,
        alpha,
        upper,
        relative_gap,
        alpha_position,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::schatten_norm;
    use crate::random::{random_tuple, seeded_rng, InstanceFamily};

    fn e11_e21() -> MatrixTuple {
        MatrixTuple::new(vec![ComplexMatrix::unit(2, 0, 0), ComplexMatrix::unit(2, 1, 0)]).unwrap()
    }

    #[test]
    fn reflected_candidate_matches_conjugated_strip_values() {
        let mut rng = seeded_rng(4);
        let coeffs = (0..3).map(|_| random_tuple(&mut rng, 2, 2, InstanceFamily::Gaussian)).collect();
        let f = AnalyticCandidate { theta: 0.3, coeffs };
        let g = f.reflect();
        for z in [C64::new(0.0, 0.4), C64::new(1.0, -1.2), C64::new(0.6, 0.1)] {
            let lhs = g.eval_strip(z);
            let rhs = f.eval_strip(C64::new(1.0, 0.0) - z.conj()).adjoint();
            assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn map_sends_theta_to_center() {
        for theta in [0.2, 0.5, 0.8] {
            assert!(strip_to_disk(theta, C64::new(theta, 0.0)).norm() < 1e-15);
        }
        let map = strip_disk_map(0.5, 64).unwrap();
        assert_eq!(map.harmonic_measure(Side::Row), 0.5);
        assert_eq!(map.harmonic_measure(Side::Column), 0.5);
    }

    #[test]
    fn boundary_preimages_lie_on_the_right_lines() {
        let map = strip_disk_map(0.3, 128).unwrap();
        for s in &map.samples {
            let expect = if s.side == Side::Column { 0.0 } else { 1.0 };
            assert!((s.z.re - expect).abs() < 1e-10, "{s:?}");
            assert!((map.forward(s.z) - s.w).norm() < 1e-10);
        }
    }

    #[test]
    fn round_trip_interior() {
        let theta = 0.35;
        for &(a, b) in &[(0.1, 0.0), (0.5, 2.0), (0.9, -1.5), (0.35, 0.0)] {
            let z = C64::new(a, b);
            let w = strip_to_disk(theta, z);
            assert!(w.norm() < 1.0);
            assert!((disk_to_strip(theta, w) - z).norm() < 1e-10);
        }
    }

    #[test]
    fn harmonic_measure_by_strip_poisson_kernel() {
        // Independent check on the strip itself: the harmonic measure of
        // Re z = 1 at the real point θ is the integral of the strip Poisson
        // kernel sin(πθ) / (2 (cosh(πy) + cos(πθ))) over that line.
        let theta: f64 = 0.25;
        let h = 1e-3;
        let mut total = 0.0;
        let mut y: f64 = -40.0;
        while y <= 40.0 {
            total += h * (PI * theta).sin() / (2.0 * ((PI * y).cosh() + (PI * theta).cos()));
            y += h;
        }
        assert!((total - theta).abs() < 1e-6, "{total}");
        let map = strip_disk_map(theta, 256).unwrap();
        assert!((map.harmonic_measure(Side::Row) - total).abs() < 1e-6);
    }

    #[test]
    fn rejects_endpoints_and_coarse_grids() {
        assert!(strip_disk_map(0.0, 64).is_err());
        assert!(strip_disk_map(1.0, 64).is_err());
        assert!(strip_disk_map(0.5, 8).is_err());
    }

    #[test]
    fn candidate_pins_base_point() {
        let mut rng = seeded_rng(3);
        let x = random_tuple(&mut rng, 2, 2, InstanceFamily::Gaussian);
        let c1 = random_tuple(&mut rng, 2, 2, InstanceFamily::Gaussian);
        let cand = AnalyticCandidate {
            theta: 0.4,
            coeffs: vec![x.clone(), c1.clone()],
        };
        assert_eq!(cand.eval_disk(C64::new(0.0, 0.0)), x);
        let at_theta = cand.eval_strip(C64::new(0.4, 0.0));
        assert!(at_theta.sub(&x).unwrap().hs_norm() < 1e-14);
        let w = C64::new(0.3, -0.2);
        let direct = x.add(&c1.scale(w)).unwrap();
        assert!(cand.eval_disk(w).sub(&direct).unwrap().hs_norm() < 1e-14);
    }

    #[test]
    fn degree_paths_are_nested() {
        for m in 0..10 {
            let a = degree_path(m);
            let b = degree_path(m + 2);
            assert_eq!(&b[..a.len()], &a[..]);
            assert_eq!(*b.last().unwrap(), m + 2);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = seeded_rng(5);
        let x = random_tuple(&mut rng, 2, 2, InstanceFamily::Gaussian);
        let map = strip_disk_map(0.4, 32).unwrap();
        for p in ["4/3", "3", "inf"] {
            let p: Exponent = p.parse().unwrap();
            let points = map
                .samples
                .iter()
                .map(|s| (s.side, (0..=2).map(|e| s.w.powu(e)).collect()))
                .collect();
            let problem = Problem {
                x: &x,
                p,
                degree: 2,
                points,
            };
            let v: Vec<f64> = (0..problem.n_params()).map(|i| 0.1 * ((i as f64) * 0.7).sin()).collect();
            let mut g = vec![0.0; v.len()];
            let mu = 0.05;
            problem.evaluate(&v, mu, &mut g);
            let mut scratch = vec![0.0; v.len()];
            for i in [0, 3, 7, v.len() - 1] {
                let h = 1e-6;
                let mut vp = v.clone();
                vp[i] += h;
                let mut vm = v.clone();
                vm[i] -= h;
                let fd = (problem.evaluate(&vp, mu, &mut scratch).0
                    - problem.evaluate(&vm, mu, &mut scratch).0)
                    / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-5 * (1.0 + g[i].abs()), "{p} {i}: {fd} vs {}", g[i]);
            }
        }
    }

    #[test]
    fn constant_candidate_bound() {
        let mut rng = seeded_rng(11);
        let x = random_tuple(&mut rng, 2, 2, InstanceFamily::Gaussian);
        let cfg = Config {
            oracle_iters: 40,
            ..Config::default()
        };
        for p in ["1", "4", "inf"] {
            let p: Exponent = p.parse().unwrap();
            let bound = column_norm(&x, p).unwrap().max(row_norm(&x, p).unwrap());
            let up = oracle_upper(&x, p, 0.5, 4, 64, &cfg).unwrap();
            assert!(up.estimate.value <= bound * (1.0 + 1e-12));
            let zero = oracle_upper(&x, p, 0.5, 0, 64, &cfg).unwrap();
            assert!((zero.estimate.value - bound).abs() <= 1e-12 * bound);
        }
    }

    #[test]
    fn p_two_upper_is_hilbert_schmidt() {
        let mut rng = seeded_rng(12);
        let x = random_tuple(&mut rng, 2, 2, InstanceFamily::Gaussian);
        let up = oracle_upper(&x, Exponent::TWO, 0.3, 4, 64, &Config::default()).unwrap();
        assert!((up.estimate.value - x.hs_norm()).abs() <= 0.02 * x.hs_norm());
    }

    #[test]
    fn e11_e21_infinity() {
        let x = e11_e21();
        let up = oracle_upper(&x, Exponent::INFINITY, 0.5, 8, 256, &Config::default()).unwrap();
        let target = 2f64.powf(0.25);
        assert!(up.estimate.value >= target * (1.0 - 1e-9));
        assert!(up.estimate.value <= target * 1.05, "{}", up.estimate.value);
    }

    #[test]
    fn lower_examples() {
        let cfg = Config::default();
        let mut rng = seeded_rng(13);
        let x = random_tuple(&mut rng, 2, 2, InstanceFamily::Gaussian);
        let lo = oracle_lower(&x, Exponent::TWO, 0.5, &cfg).unwrap();
        assert!((lo.value - x.hs_norm()).abs() < 1e-9 * x.hs_norm());
        assert!(oracle_lower(&x, Exponent::TWO, 1.0, &cfg).is_err());
    }

    #[test]
    fn single_entry_sandwich() {
        let mut rng = seeded_rng(14);
        let x = random_tuple(&mut rng, 2, 1, InstanceFamily::Gaussian);
        let p: Exponent = "4".parse().unwrap();
        let s = schatten_norm(&x.mats()[0], p).unwrap();
        let rep = sandwich(&x, p, 0.5, &Config::default()).unwrap();
        for v in [rep.lower.value, rep.alpha.value, rep.upper.value] {
            assert!((v - s).abs() <= 0.01 * s, "{v} vs {s}");
        }
    }
}
