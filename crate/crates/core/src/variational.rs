//! The explicit variational expressions `α_{p,θ}`: a factorization infimum
//! for `p ≤ 2` and a unit-ball supremum for `p ≥ 2`, plus the duality
//! estimate through the trace pairing.
//!
//! Both regimes are solved by exact block-coordinate updates. With
//! `h = a*a` and `g = b b*` the supremum objective `Σ‖a x_k b‖₂²` equals
//! `tr(h Σ x_k g x_k*)`, which is linear in each block; maximizing a linear
//! functional `tr(hG)` over the positive part of an `L_s` ball has the
//! closed form `h ∝ G^{s'-1}`. With `A = a²`, `B = b²` the infimum objective
//! (after eliminating `y_k = a⁻¹ x_k b⁻¹`) is `Σ tr(x_k* A⁻¹ x_k B⁻¹)`, and
//! minimizing `tr(A⁻¹K)` over `‖A‖_s ≤ 1` is solved by `A ∝ K^{1/(1+s)}`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::interp::AnalyticCandidate;
use crate::linalg::{
    pseudo_power_of, psd_schatten_norm, schatten_norm, trace_pairing, ComplexMatrix, Exponent,
    HermitianEigen, MatrixTuple, C64,
};
use crate::random::{random_psd, seeded_rng};

/// Relative reconstruction tolerance of factorization witnesses.
pub const TOL_FACT: f64 = 1e-8;

/// Relative regularization of the initial guess of the infimum solver.
const INIT_EPS: f64 = 1e-6;

/// `(p, p′, θ, r, r₀(θ), r₁(θ))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub p: Exponent,
    pub p_conj: Exponent,
    pub theta: f64,
    pub r: Exponent,
    pub r0: Exponent,
    pub r1: Exponent,
}

impl Exponents {
    /// Exponents for the same `θ` at the conjugate index; `r, r₀, r₁` are
    /// unchanged.
    pub fn conjugate(&self) -> Self {
        Self {
            p: self.p_conj,
            p_conj: self.p,
            ..*self
        }
    }

    pub fn is_sup_regime(&self) -> bool {
        self.p.recip() <= 0.5
    }

    pub fn is_inf_regime(&self) -> bool {
        self.p.recip() >= 0.5
    }
}

pub fn derive_exponents(p: Exponent, theta: f64) -> Result<Exponents> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::OutOfRange(format!("theta = {theta} is outside [0, 1]")));
    }
    let p_conj = p.conjugate();
    // 1/max(p, p') = min(1/p, 1/p')
    let inv_r = 1.0 - 2.0 * p.recip().min(p_conj.recip());
    let inv_r = inv_r.max(0.0);
    Ok(Exponents {
        p,
        p_conj,
        theta,
        r: Exponent::from_recip(inv_r)?,
        r0: Exponent::from_recip(theta * inv_r / 2.0)?,
        r1: Exponent::from_recip((1.0 - theta) * inv_r / 2.0)?,
    })
}

/// `x_k = a y_k b` with its objective `‖a‖_{r₀} ‖b‖_{r₁} (Σ‖y_k‖₂²)^{1/2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    pub a: ComplexMatrix,
    pub ys: MatrixTuple,
    pub b: ComplexMatrix,
    pub objective: f64,
}

impl Factorization {
    /// Builds the factorization and evaluates its objective.
    pub fn new(a: ComplexMatrix, ys: MatrixTuple, b: ComplexMatrix, ex: &Exponents) -> Result<Self> {
        let objective = schatten_norm(&a, ex.r0)? * schatten_norm(&b, ex.r1)? * ys.hs_norm();
        Ok(Self { a, ys, b, objective })
    }

    /// `(a y_k b)_k`.
    pub fn product(&self) -> MatrixTuple {
        self.ys.sandwich(&self.a, &self.b)
    }

    /// `max_k ‖a y_k b − x_k‖₂ / max(‖x‖, tiny)`.
    pub fn reconstruction_error(&self, x: &MatrixTuple) -> Result<f64> {
        let diff = self.product().sub(x)?;
        Ok(diff.hs_norm() / x.hs_norm().max(f64::MIN_POSITIVE))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateKind {
    Exact,
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Factorization(Factorization),
    /// PSD `a`, `b` in the unit balls of `L_{r₀}` and `L_{r₁}`.
    UnitBall { a: ComplexMatrix, b: ComplexMatrix },
    /// A dual tuple `z` normalized so its dual norm is (at most) one.
    Dual(MatrixTuple),
    /// An analytic function on the strip taking the value `x` at `θ`.
    Analytic(AnalyticCandidate),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub witness: Option<Witness>,
    pub iterations: usize,
    pub converged: bool,
}

impl NormEstimate {
    pub fn exact(value: f64, witness: Option<Witness>) -> Self {
        Self {
            value,
            kind: EstimateKind::Exact,
            witness,
            iterations: 0,
            converged: true,
        }
    }

    pub fn factorization(&self) -> Option<&Factorization> {
        match &self.witness {
            Some(Witness::Factorization(f)) => Some(f),
            _ => None,
        }
    }
}

/// `Σ x_k g x_k*`.
fn row_weighted(x: &MatrixTuple, g: &DMatrix<C64>) -> ComplexMatrix {
    let d = x.dim();
    let mut acc = DMatrix::<C64>::zeros(d, d);
    for m in x.iter() {
        let m = m.as_dmatrix();
        acc += m * g * m.adjoint();
    }
    ComplexMatrix::from_raw(acc).hermitian_part()
}

/// `Σ x_k* h x_k`.
fn column_weighted(x: &MatrixTuple, h: &DMatrix<C64>) -> ComplexMatrix {
    let d = x.dim();
    let mut acc = DMatrix::<C64>::zeros(d, d);
    for m in x.iter() {
        let m = m.as_dmatrix();
        acc += m.adjoint() * h * m;
    }
    ComplexMatrix::from_raw(acc).hermitian_part()
}

/// Maximizer of `tr(hG)` over PSD `h` with `‖h‖_s ≤ 1`, for PSD `G`.
/// Returns `(h, ‖G‖_{s'})`.
fn dual_ball_maximizer(gram: &ComplexMatrix, s: Exponent) -> (ComplexMatrix, f64) {
    let d = gram.dim();
    let eig = HermitianEigen::new(gram);
    let values: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
    let top = values.iter().fold(0.0_f64, |a, &b| a.max(b));
    if top == 0.0 {
        let h = match s {
            Exponent::Infinite => ComplexMatrix::identity(d),
            Exponent::Finite(q) => ComplexMatrix::identity(d).scale_re((d as f64).powf(-1.0 / q)),
        };
        return (h, 0.0);
    }
    match s {
        Exponent::Infinite => (ComplexMatrix::identity(d), values.iter().sum()),
        Exponent::Finite(1.0) => {
            // Full top eigenprojection, uniformly weighted.
            let cut = top * (1.0 - 1e-12);
            let mult = values.iter().filter(|&&v| v >= cut).count() as f64;
            let h = eig.map(|l| if l >= cut { 1.0 / mult } else { 0.0 });
            (h, top)
        }
        Exponent::Finite(q) => {
            let dual = q / (q - 1.0);
            let norm = crate::linalg::vector_pnorm(&values, Exponent::Finite(dual));
            let h = eig.map(|l| (l.max(0.0) / norm).powf(dual - 1.0));
            (h, norm)
        }
    }
}

fn normalized_start(m: &ComplexMatrix, s: Exponent) -> ComplexMatrix {
    let n = psd_schatten_norm(m, s);
    m.scale_re(1.0 / n)
}

/// One run of the alternating ascent for the supremum formula.
pub(crate) struct SupRun {
    /// Squared objective `Σ‖a x_k b‖₂²`.
    pub value: f64,
    pub h: ComplexMatrix,
    pub g: ComplexMatrix,
    pub iterations: usize,
    pub converged: bool,
    /// Squared objective after every half-step (starting value first).
    pub history: Vec<f64>,
}

pub(crate) fn sup_ascent(
    x: &MatrixTuple,
    ex: &Exponents,
    g0: ComplexMatrix,
    cfg: &Config,
) -> SupRun {
    // h lives in the unit ball of L_{r0/2}, g in that of L_{r1/2}.
    let s = half(ex.r0);
    let t = half(ex.r1);
    let mut g = g0;
    let mut h = ComplexMatrix::identity(x.dim());
    let start = row_weighted(x, g.as_dmatrix());
    let mut value = f64::NAN;
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    if start.max_abs() == 0.0 {
        return SupRun {
            value: 0.0,
            h,
            g,
            iterations,
            converged: true,
            history: vec![0.0],
        };
    }
    for it in 0..cfg.max_iters {
        iterations = it + 1;
        let (h_new, v_half) = dual_ball_maximizer(&row_weighted(x, g.as_dmatrix()), s);
        let (g_new, v_full) = dual_ball_maximizer(&column_weighted(x, h_new.as_dmatrix()), t);
        history.push(v_half);
        history.push(v_full);
        let step = (&g_new - &g).frobenius_norm() / g_new.frobenius_norm().max(f64::MIN_POSITIVE)
            + (&h_new - &h).frobenius_norm() / h_new.frobenius_norm().max(f64::MIN_POSITIVE);
        let prev = value;
        h = h_new;
        g = g_new;
        value = v_full;
        if it > 0 && (value - prev).abs() <= cfg.tol * value && step <= cfg.tol.sqrt() {
            converged = true;
            break;
        }
    }
    SupRun {
        value,
        h,
        g,
        iterations,
        converged,
        history,
    }
}

fn half(r: Exponent) -> Exponent {
    match r {
        Exponent::Infinite => Exponent::Infinite,
        Exponent::Finite(v) => Exponent::Finite(v / 2.0),
    }
}

fn sup_starts(x: &MatrixTuple, ex: &Exponents, cfg: &Config) -> Vec<ComplexMatrix> {
    let d = x.dim();
    let t = half(ex.r1);
    let mut starts = vec![normalized_start(&ComplexMatrix::identity(d), t)];
    let gram = x.column_gram();
    if gram.max_abs() > 0.0 {
        starts.push(normalized_start(&gram, t));
    }
    let mut rng = seeded_rng(cfg.seed);
    for _ in 0..cfg.restarts {
        starts.push(normalized_start(&random_psd(&mut rng, d), t));
    }
    starts
}

/// Lower bound on `sup {(Σ‖a x_k b‖₂²)^{1/2}}` over the unit balls of
/// `L_{r₀}` and `L_{r₁}`, best over the deterministic and seeded starts.
pub fn alpha_sup(x: &MatrixTuple, p: Exponent, theta: f64, cfg: &Config) -> Result<NormEstimate> {
    let ex = derive_exponents(p, theta)?;
    if !ex.is_sup_regime() {
        return Err(Error::Regime {
            operation: "alpha_sup",
            requirement: "p >= 2",
        });
    }
    Ok(alpha_sup_with(x, &ex, cfg))
}

pub(crate) fn alpha_sup_with(x: &MatrixTuple, ex: &Exponents, cfg: &Config) -> NormEstimate {
    let mut best: Option<SupRun> = None;
    let mut iterations = 0;
    for g0 in sup_starts(x, ex, cfg) {
        let run = sup_ascent(x, ex, g0, cfg);
        iterations += run.iterations;
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    let a = psd_sqrt(&best.h);
    let b = psd_sqrt(&best.g);
    let value = x.sandwich(&a, &b).hs_norm();
    NormEstimate {
        value,
        kind: EstimateKind::Lower,
        witness: Some(Witness::UnitBall { a, b }),
        iterations,
        converged: best.converged,
    }
}

/// Squared objectives of the deterministic-start ascent, one entry per
/// half-step; nondecreasing by construction.
pub fn alpha_sup_history(x: &MatrixTuple, p: Exponent, theta: f64, cfg: &Config) -> Result<Vec<f64>> {
    let ex = derive_exponents(p, theta)?;
    if !ex.is_sup_regime() {
        return Err(Error::Regime {
            operation: "alpha_sup",
            requirement: "p >= 2",
        });
    }
    let g0 = sup_starts(x, &ex, cfg).swap_remove(0);
    Ok(sup_ascent(x, &ex, g0, cfg).history)
}

fn psd_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    HermitianEigen::new(m).map(|l| l.max(0.0).sqrt())
}

/// Minimizer of `tr(A⁺K)` over PSD `A` with `‖A‖_s ≤ 1`: `A ∝ K^{1/(1+s)}`
/// on the support of `K`. Returns `(A, A⁺)`.
fn inverse_ball_minimizer(k: &ComplexMatrix, s: Exponent) -> (ComplexMatrix, ComplexMatrix) {
    let eig = HermitianEigen::new(k);
    let beta = match s {
        Exponent::Infinite => 0.0,
        Exponent::Finite(q) => 1.0 / (1.0 + q),
    };
    let unnormalized = pseudo_power_of(&eig, beta);
    let scale = psd_schatten_norm(&unnormalized, s);
    if scale == 0.0 {
        let d = k.dim();
        return (ComplexMatrix::zeros(d), ComplexMatrix::zeros(d));
    }
    let a = unnormalized.scale_re(1.0 / scale);
    let a_inv = pseudo_power_of(&eig, -beta).scale_re(scale);
    (a, a_inv)
}

pub(crate) struct InfRun {
    pub a_sq: ComplexMatrix,
    pub b_sq: ComplexMatrix,
    pub a_inv: ComplexMatrix,
    pub b_inv: ComplexMatrix,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn inf_descent(
    x: &MatrixTuple,
    ex: &Exponents,
    b_inv0: ComplexMatrix,
    cfg: &Config,
) -> InfRun {
    let s = half(ex.r0);
    let t = half(ex.r1);
    let d = x.dim();
    let mut b_inv = b_inv0;
    let mut b_sq = ComplexMatrix::zeros(d);
    let mut a_sq = ComplexMatrix::zeros(d);
    let mut a_inv = ComplexMatrix::zeros(d);
    let mut value = f64::NAN;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..cfg.max_iters {
        iterations = it + 1;
        let k = row_weighted(x, b_inv.as_dmatrix());
        let (a_new, a_inv_new) = inverse_ball_minimizer(&k, s);
        let l = column_weighted(x, a_inv_new.as_dmatrix());
        let (b_new, b_inv_new) = inverse_ball_minimizer(&l, t);
        let v = (&l * &b_inv_new).trace().re;
        let step = (&b_new - &b_sq).frobenius_norm() / b_new.frobenius_norm().max(f64::MIN_POSITIVE)
            + (&a_new - &a_sq).frobenius_norm() / a_new.frobenius_norm().max(f64::MIN_POSITIVE);
        let prev = value;
        a_sq = a_new;
        a_inv = a_inv_new;
        b_sq = b_new;
        b_inv = b_inv_new;
        value = v;
        if v == 0.0 || (it > 0 && (prev - value).abs() <= cfg.tol * value && step <= cfg.tol.sqrt())
        {
            converged = true;
            break;
        }
    }
    InfRun {
        a_sq,
        b_sq,
        a_inv,
        b_inv,
        iterations,
        converged,
    }
}

fn inf_starts(x: &MatrixTuple, ex: &Exponents, cfg: &Config) -> Vec<ComplexMatrix> {
    let d = x.dim();
    // b₀ = (εI + Σ x_k* x_k)^{p/(2 r₁)}, i.e. B₀ = b₀², reproduces the tight
    // single-entry factorization; the solver consumes B₀⁺.
    let gram = x.column_gram();
    let eps = INIT_EPS * gram.max_abs().max(f64::MIN_POSITIVE);
    let reg = &gram + &ComplexMatrix::identity(d).scale_re(eps);
    let expo = ex.p.value() * ex.r1.recip();
    let b0_inv = HermitianEigen::new(&reg).map(|l| l.max(eps).powf(-expo));
    let mut starts = vec![b0_inv];
    let mut rng = seeded_rng(cfg.seed.wrapping_add(0x9e37_79b9));
    for _ in 0..cfg.restarts {
        let m = random_psd(&mut rng, d);
        starts.push(HermitianEigen::new(&m).map(|l| 1.0 / (l + 1e-3)));
    }
    starts
}

/// Upper bound on the factorization infimum, with a factorization witness.
pub fn alpha_inf(x: &MatrixTuple, p: Exponent, theta: f64, cfg: &Config) -> Result<NormEstimate> {
    let ex = derive_exponents(p, theta)?;
    if !ex.is_inf_regime() {
        return Err(Error::Regime {
            operation: "alpha_inf",
            requirement: "p <= 2",
        });
    }
    alpha_inf_with(x, &ex, cfg)
}

pub(crate) fn alpha_inf_with(x: &MatrixTuple, ex: &Exponents, cfg: &Config) -> Result<NormEstimate> {
    if x.max_abs() == 0.0 {
        let d = x.dim();
        let f = Factorization::new(
            ComplexMatrix::identity(d),
            x.clone(),
            ComplexMatrix::identity(d),
            ex,
        )?;
        return Ok(NormEstimate::exact(0.0, Some(Witness::Factorization(f))));
    }
    let mut best: Option<(Factorization, InfRun)> = None;
    let mut iterations = 0;
    for b0 in inf_starts(x, ex, cfg) {
        let run = inf_descent(x, ex, b0, cfg);
        iterations += run.iterations;
        let fact = witness_from_run(x, ex, &run)?;
        if best.as_ref().is_none_or(|(f, _)| fact.objective < f.objective) {
            best = Some((fact, run));
        }
    }
    let (fact, run) = best.expect("at least one start");
    Ok(NormEstimate {
        value: fact.objective,
        kind: EstimateKind::Upper,
        witness: Some(Witness::Factorization(fact)),
        iterations,
        converged: run.converged,
    })
}

fn witness_from_run(x: &MatrixTuple, ex: &Exponents, run: &InfRun) -> Result<Factorization> {
    let a = psd_sqrt(&run.a_sq);
    let b = psd_sqrt(&run.b_sq);
    let a_pinv = psd_sqrt(&run.a_inv);
    let b_pinv = psd_sqrt(&run.b_inv);
    let ys = x.sandwich(&a_pinv, &b_pinv);
    Factorization::new(a, ys, b, ex)
}

/// `α_{p,θ}(x)`, dispatched on the regime; exact at `p = 2`.
pub fn alpha(x: &MatrixTuple, p: Exponent, theta: f64, cfg: &Config) -> Result<NormEstimate> {
    let ex = derive_exponents(p, theta)?;
    alpha_with(x, &ex, cfg)
}

pub(crate) fn alpha_with(x: &MatrixTuple, ex: &Exponents, cfg: &Config) -> Result<NormEstimate> {
    if ex.p == Exponent::TWO {
        let d = x.dim();
        let f = Factorization::new(
            ComplexMatrix::identity(d),
            x.clone(),
            ComplexMatrix::identity(d),
            ex,
        )?;
        return Ok(NormEstimate::exact(x.hs_norm(), Some(Witness::Factorization(f))));
    }
    if ex.is_sup_regime() {
        Ok(alpha_sup_with(x, ex, cfg))
    } else {
        alpha_inf_with(x, ex, cfg)
    }
}

/// Gradient of `α` at `x` (real inner product `Re tr(D* dx)`), read off the
/// optimizer of the estimate. This is also the dual element saturating the
/// pairing.
pub(crate) fn alpha_gradient(x: &MatrixTuple, est: &NormEstimate) -> Option<MatrixTuple> {
    if est.value == 0.0 {
        return None;
    }
    match est.witness.as_ref()? {
        Witness::UnitBall { a, b } => {
            let h = a * a;
            let g = b * b;
            Some(x.sandwich(&h, &g).scale_re(1.0 / est.value))
        }
        Witness::Factorization(f) => {
            // y_k = a⁺ x_k b⁺ ⇒ ∂α/∂x_k = a⁺ y_k b⁺ / ‖y‖ (with ‖a‖ = ‖b‖ = 1
            // this is A⁺ x_k B⁺ / α).
            let na = schatten_norm(&f.a, Exponent::INFINITY).ok()?;
            let nb = schatten_norm(&f.b, Exponent::INFINITY).ok()?;
            if na == 0.0 || nb == 0.0 {
                return None;
            }
            let a_pinv = crate::linalg::psd_pseudo_power(&f.a.hermitian_part(), -1.0).ok()?;
            let b_pinv = crate::linalg::psd_pseudo_power(&f.b.hermitian_part(), -1.0).ok()?;
            let hs = f.ys.hs_norm();
            if hs == 0.0 {
                return None;
            }
            Some(
                f.ys
                    .sandwich(&a_pinv, &b_pinv)
                    .scale_re(f.objective / (hs * hs)),
            )
        }
        Witness::Dual(_) | Witness::Analytic(_) => None,
    }
}

/// Ratio `|⟨x, z⟩| / α_{p′}(z)` together with the dual estimate.
fn dual_ratio(x: &MatrixTuple, z: &MatrixTuple, ex_dual: &Exponents, cfg: &Config) -> Result<(f64, NormEstimate)> {
    let est = alpha_with(z, ex_dual, cfg)?;
    let pairing = trace_pairing(x, z)?.norm();
    let ratio = if est.value > 0.0 { pairing / est.value } else { 0.0 };
    Ok((ratio, est))
}

/// Lower bound on `α_{p,θ}(x)` as `sup |⟨x, z⟩| / α_{p′,θ}(z)`, by gradient
/// ascent over `z` from a few natural dual directions.
pub fn dual_norm_estimate(
    x: &MatrixTuple,
    p: Exponent,
    theta: f64,
    cfg: &Config,
) -> Result<NormEstimate> {
    let ex = derive_exponents(p, theta)?;
    dual_norm_estimate_with(x, &ex, cfg)
}

pub(crate) fn dual_norm_estimate_with(
    x: &MatrixTuple,
    ex: &Exponents,
    cfg: &Config,
) -> Result<NormEstimate> {
    if x.max_abs() == 0.0 {
        return Ok(NormEstimate::exact(0.0, None));
    }
    let ex_dual = ex.conjugate();
    let light = Config {
        restarts: 0,
        ..cfg.clone()
    };

    let mut starts = vec![x.clone()];
    if let Ok(primal) = alpha_with(x, ex, &light) {
        if let Some(z) = alpha_gradient(x, &primal) {
            starts.push(z);
        }
    }

    let mut best: Option<(f64, MatrixTuple, NormEstimate)> = None;
    for z in starts {
        let (ratio, est) = dual_ratio(x, &z, &ex_dual, &light)?;
        if best.as_ref().is_none_or(|(r, _, _)| ratio > *r) {
            best = Some((ratio, z, est));
        }
    }
    let (mut ratio, mut z, mut est) = best.expect("at least one start");
    let mut iterations = 0;
    let mut step = 0.5;
    let mut converged = false;
    for _ in 0..cfg.ascent_iters {
        iterations += 1;
        let Some(grad) = ratio_gradient(x, &z, &est, ratio) else {
            converged = true;
            break;
        };
        let gnorm = grad.hs_norm();
        let znorm = z.hs_norm();
        if gnorm <= 1e-14 * (ratio / znorm.max(f64::MIN_POSITIVE)) {
            converged = true;
            break;
        }
        let mut improved = false;
        for _ in 0..12 {
            let trial = z.add(&grad.scale_re(step * znorm / gnorm))?;
            let (r, e) = dual_ratio(x, &trial, &ex_dual, &light)?;
            if r > ratio {
                let gain = (r - ratio) / r;
                z = trial;
                ratio = r;
                est = e;
                step = (step * 2.0).min(1.0);
                improved = true;
                if gain < cfg.tol {
                    converged = true;
                }
                break;
            }
            step *= 0.25;
        }
        if !improved || converged {
            converged = true;
            break;
        }
    }

    // Final evaluation with every restart; a larger dual value only lowers
    // the bound.
    let (final_ratio, final_est) = dual_ratio(x, &z, &ex_dual, cfg)?;
    let dual_value = final_est.value;
    let witness = if dual_value > 0.0 {
        Some(Witness::Dual(z.scale_re(1.0 / dual_value)))
    } else {
        None
    };
    Ok(NormEstimate {
        value: final_ratio,
        kind: EstimateKind::Lower,
        witness,
        iterations,
        converged,
    })
}

/// Gradient of `z ↦ Re⟨x, e^{iφ}z⟩ / α′(z)` at the phase making the pairing
/// positive, returned already rotated into that phase frame.
fn ratio_gradient(x: &MatrixTuple, z: &MatrixTuple, est: &NormEstimate, ratio: f64) -> Option<MatrixTuple> {
    let c = trace_pairing(x, z).ok()?;
    if c.norm() == 0.0 || est.value == 0.0 {
        return None;
    }
    let phase = c / c.norm();
    let grad_alpha = alpha_gradient(z, est)?;
    // For the rotated z' = phase·z, ∇α'(z') = phase·∇α'(z).
    let grad_alpha = grad_alpha.scale(phase);
    let lhs = x.scale_re(1.0 / est.value);
    let rhs = grad_alpha.scale_re(ratio / est.value);
    let g = lhs.sub(&rhs).ok()?;
    // Move back to the frame of z: z + η g' with g' = conj(phase)·g.
    Some(g.scale(phase.conj()))
}
