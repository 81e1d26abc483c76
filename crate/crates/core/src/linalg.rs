//! Dense complex matrices on `M_d` with the unnormalized trace, Schatten
//! norms and the functional calculus of positive matrices.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Hermiticity / positivity tolerance, relative to the spectral norm.
pub const TOL_PSD: f64 = 1e-10;

/// Eigenvalues below this fraction of the largest one count as zero when
/// inverting.
pub const PINV_THRESHOLD: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Shape(format!(
                "expected a non-empty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_slice(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Shape(format!(
                "{} entries cannot fill a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let entries: Vec<C64> = rows
            .iter()
            .flat_map(|r| r.iter().map(|&v| C64::new(v, 0.0)))
            .collect();
        Self::from_row_slice(dim, &entries)
    }

    pub(crate) fn from_raw(m: DMatrix<C64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    /// Matrix unit `e_{ij}` (zero-based indices).
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(i, j)] = ONE;
        Self(m)
    }

    pub fn diag(values: &[f64]) -> Self {
        let d = values.len();
        let mut m = DMatrix::zeros(d, d);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<C64> {
        let d = self.dim();
        (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| self.0[(i, j)])
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(&self.0 * c)
    }

    pub fn scale_re(&self, c: f64) -> Self {
        Self(self.0.map(|z| z * c))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Hilbert-Schmidt norm `‖m‖₂`.
    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `(m + m*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()).map(|z| z * 0.5))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn inverse(&self) -> Result<Self> {
        let scale = self.max_abs();
        if scale == 0.0 {
            return Err(Error::Singular);
        }
        let inv = self.0.clone().try_inverse().ok_or(Error::Singular)?;
        if !inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Singular);
        }
        Ok(Self(inv))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// Column-stacking vectorization.
    pub fn vec(&self) -> Vec<C64> {
        self.0.iter().copied().collect()
    }

    /// Inverse of [`ComplexMatrix::vec`].
    pub fn unvec(dim: usize, v: &[C64]) -> Result<Self> {
        if v.len() != dim * dim {
            return Err(Error::Shape(format!(
                "vector of length {} is not a {dim}x{dim} matrix",
                v.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_column_slice(dim, dim, v))
    }

    /// Singular values in nonincreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.0.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn spectral_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.0 += &rhs.0;
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    /// Decomposes the Hermitian part of `m`.
    pub fn new(m: &ComplexMatrix) -> Self {
        let h = m.hermitian_part();
        let eig = SymmetricEigen::new(h.0);
        let d = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
        Self { values, vectors }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `V diag(f(λ)) V*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for (c, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for r in 0..d {
                scaled[(r, c)] *= w;
            }
        }
        ComplexMatrix(scaled * self.vectors.adjoint())
    }
}

/// Extended exponent in `[1, ∞]`, with `∞` kept exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub const ONE: Self = Self::Finite(1.0);
    pub const TWO: Self = Self::Finite(2.0);
    pub const INFINITY: Self = Self::Infinite;

    pub fn new(value: f64) -> Result<Self> {
        if value == f64::INFINITY {
            Ok(Self::Infinite)
        } else if value.is_finite() && value >= 1.0 {
            Ok(Self::Finite(value))
        } else {
            Err(Error::InvalidExponent(value.to_string()))
        }
    }

    /// The exponent whose reciprocal is `recip` (`0 ↦ ∞`).
    pub fn from_recip(recip: f64) -> Result<Self> {
        if recip == 0.0 {
            Ok(Self::Infinite)
        } else if recip > 0.0 && recip <= 1.0 {
            Ok(Self::Finite(1.0 / recip))
        } else {
            Err(Error::InvalidExponent(format!("1/{recip}")))
        }
    }

    pub fn recip(self) -> f64 {
        match self {
            Self::Finite(v) => 1.0 / v,
            Self::Infinite => 0.0,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Self::Finite(v) => v,
            Self::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinite)
    }

    /// Hölder conjugate.
    pub fn conjugate(self) -> Self {
        match self {
            Self::Infinite => Self::ONE,
            Self::Finite(1.0) => Self::Infinite,
            Self::Finite(v) => Self::Finite(v / (v - 1.0)),
        }
    }
}

pub fn conjugate_exponent(p: Exponent) -> Exponent {
    p.conjugate()
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `inf`, a decimal, or a fraction such as `4/3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => return Ok(Self::Infinite),
            _ => {}
        }
        let bad = || Error::InvalidExponent(s.to_string());
        let value = match s.split_once('/') {
            Some((num, den)) => {
                let num: f64 = num.trim().parse().map_err(|_| bad())?;
                let den: f64 = den.trim().parse().map_err(|_| bad())?;
                num / den
            }
            None => s.parse().map_err(|_| bad())?,
        };
        Self::new(value).map_err(|_| bad())
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `‖v‖_p` of a nonnegative vector, scaled against overflow.
pub(crate) fn vector_pnorm(values: &[f64], p: Exponent) -> f64 {
    let max = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0.0;
    }
    match p {
        Exponent::Infinite => max,
        Exponent::Finite(q) => {
            let sum: f64 = values.iter().map(|v| (v.abs() / max).powf(q)).sum();
            max * sum.powf(1.0 / q)
        }
    }
}

/// Schatten `p`-norm `(Σ sᵢ^p)^{1/p}`, the largest singular value at `p = ∞`.
pub fn schatten_norm(m: &ComplexMatrix, p: Exponent) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(vector_pnorm(&m.singular_values(), p))
}

/// Schatten norm of a PSD matrix, computed from its eigenvalues.
pub(crate) fn psd_schatten_norm(m: &ComplexMatrix, p: Exponent) -> f64 {
    let eig = HermitianEigen::new(m);
    let values: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
    vector_pnorm(&values, p)
}

fn checked_psd_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let eig = HermitianEigen::new(m);
    let scale = eig.max_abs();
    let skew = (m - &m.adjoint()).frobenius_norm();
    if skew > TOL_PSD * scale.max(f64::MIN_POSITIVE) * (m.dim() as f64).sqrt() * 2.0 {
        return Err(Error::Shape("matrix is not Hermitian".into()));
    }
    let min = eig.values.first().copied().unwrap_or(0.0);
    if min < -TOL_PSD * scale {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(eig)
}

/// `m^s` for Hermitian PSD `m`. Eigenvalues in `[-tol, 0]` are clamped to
/// zero; negative powers require every eigenvalue above the inversion
/// threshold. `m^0` is the identity.
pub fn psd_power(m: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
    let eig = checked_psd_eigen(m)?;
    if s == 0.0 {
        return Ok(ComplexMatrix::identity(m.dim()));
    }
    let scale = eig.max_abs();
    if s < 0.0 {
        let min = eig.values.first().copied().unwrap_or(0.0);
        if scale == 0.0 || min <= PINV_THRESHOLD * scale {
            return Err(Error::Singular);
        }
    }
    Ok(eig.map(|l| l.max(0.0).powf(s)))
}

/// `m^s` on the support of `m` and zero on its kernel, so `s = 0` gives the
/// support projection and negative `s` a pseudo-inverse power.
pub fn psd_pseudo_power(m: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
    let eig = checked_psd_eigen(m)?;
    Ok(pseudo_power_of(&eig, s))
}

pub(crate) fn pseudo_power_of(eig: &HermitianEigen, s: f64) -> ComplexMatrix {
    let cut = PINV_THRESHOLD * eig.max_abs();
    eig.map(|l| if l > cut && l > 0.0 { l.powf(s) } else { 0.0 })
}

/// Polar decomposition `m = u h` with `h = (m*m)^{1/2}` and `u` a partial
/// isometry from the range of `h` onto the range of `m`.
pub fn polar(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let d = m.dim();
    let svd = m.0.clone().svd(true, true);
    let u = svd.u.ok_or(Error::Singular)?;
    let v_t = svd.v_t.ok_or(Error::Singular)?;
    let sigma = svd.singular_values;
    let top = sigma.iter().fold(0.0_f64, |a, &b| a.max(b));
    let cut = PINV_THRESHOLD * top;
    let mut iso = DMatrix::<C64>::zeros(d, d);
    let mut h = DMatrix::<C64>::zeros(d, d);
    for i in 0..sigma.len() {
        let ui = u.column(i);
        let vi = v_t.row(i).adjoint();
        h += &vi * vi.adjoint() * C64::new(sigma[i], 0.0);
        if sigma[i] > cut {
            iso += ui * vi.adjoint();
        }
    }
    let h = ComplexMatrix(h).hermitian_part();
    Ok((ComplexMatrix(iso), h))
}

/// An `n`-tuple of `d×d` complex matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    dim: usize,
    mats: Vec<ComplexMatrix>,
}

impl MatrixTuple {
    pub fn new(mats: Vec<ComplexMatrix>) -> Result<Self> {
        let first = mats
            .first()
            .ok_or_else(|| Error::Shape("a tuple needs at least one matrix".into()))?;
        let dim = first.dim();
        for (k, m) in mats.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::Shape(format!(
                    "entry {k} is {}x{}, expected {dim}x{dim}",
                    m.dim(),
                    m.dim()
                )));
            }
            if !m.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { dim, mats })
    }

    pub(crate) fn from_raw(dim: usize, mats: Vec<ComplexMatrix>) -> Self {
        debug_assert!(mats.iter().all(|m| m.dim() == dim));
        Self { dim, mats }
    }

    pub fn zeros(dim: usize, n: usize) -> Self {
        Self::from_raw(dim, vec![ComplexMatrix::zeros(dim); n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn mats(&self) -> &[ComplexMatrix] {
        &self.mats
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ComplexMatrix> {
        self.mats.iter()
    }

    pub fn into_vec(self) -> Vec<ComplexMatrix> {
        self.mats
    }

    pub fn map(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        Self::from_raw(self.dim, self.mats.iter().map(f).collect())
    }

    /// Entrywise adjoint `(x₁*, …, x_n*)`.
    pub fn adjoint(&self) -> Self {
        self.map(ComplexMatrix::adjoint)
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|m| m.scale(c))
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.map(|m| m.scale_re(c))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.len() != other.len() {
            return Err(Error::Shape(format!(
                "tuples of shape (d={}, n={}) and (d={}, n={})",
                self.dim,
                self.len(),
                other.dim,
                other.len()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self::from_raw(
            self.dim,
            self.mats.iter().zip(&other.mats).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self::from_raw(
            self.dim,
            self.mats.iter().zip(&other.mats).map(|(a, b)| a - b).collect(),
        ))
    }

    /// `(a x_k b)_k`.
    pub fn sandwich(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Self {
        self.map(|m| &(a * m) * b)
    }

    /// `Σ x_k* x_k`, symmetrized.
    pub fn column_gram(&self) -> ComplexMatrix {
        let mut g = DMatrix::<C64>::zeros(self.dim, self.dim);
        for m in &self.mats {
            g += m.0.adjoint() * &m.0;
        }
        ComplexMatrix(g).hermitian_part()
    }

    /// `Σ x_k x_k*`, symmetrized.
    pub fn row_gram(&self) -> ComplexMatrix {
        let mut g = DMatrix::<C64>::zeros(self.dim, self.dim);
        for m in &self.mats {
            g += &m.0 * m.0.adjoint();
        }
        ComplexMatrix(g).hermitian_part()
    }

    /// `(Σ ‖x_k‖₂²)^{1/2}`.
    pub fn hs_norm(&self) -> f64 {
        self.mats
            .iter()
            .map(|m| m.0.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entry modulus over the tuple.
    pub fn max_abs(&self) -> f64 {
        self.mats.iter().map(ComplexMatrix::max_abs).fold(0.0, f64::max)
    }
}

/// `Σ_k tr(y_k* x_k)`.
pub fn trace_pairing(x: &MatrixTuple, y: &MatrixTuple) -> Result<C64> {
    x.check_same_shape(y)?;
    let mut acc = ZERO;
    for (a, b) in x.mats.iter().zip(&y.mats) {
        for (u, v) in a.0.iter().zip(b.0.iter()) {
            acc += v.conj() * u;
        }
    }
    Ok(acc)
}

impl Serialize for ComplexMatrix {
    /// Rows of `[re, im]` pairs.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let rows: Vec<Vec<[f64; 2]>> = (0..d)
            .map(|i| (0..d).map(|j| [self.0[(i, j)].re, self.0[(i, j)].im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let d = rows.len();
        let mut entries = Vec::with_capacity(d * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(serde::de::Error::custom(format!(
                    "row {i} has {} entries, expected {d}",
                    row.len()
                )));
            }
            entries.extend(row.iter().map(|[re, im]| C64::new(*re, *im)));
        }
        ComplexMatrix::from_row_slice(d, &entries).map_err(serde::de::Error::custom)
    }
}

impl Serialize for MatrixTuple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.mats.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MatrixTuple {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let mats = Vec::<ComplexMatrix>::deserialize(deserializer)?;
        MatrixTuple::new(mats).map_err(serde::de::Error::custom)
    }
}
