//! Seeded random instances: i.i.d. complex Gaussian entries, optionally
//! pushed to PSD or unitary families.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::{ComplexMatrix, MatrixTuple, C64};

pub type InstanceRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceFamily {
    #[default]
    Gaussian,
    Psd,
    Unitary,
}

impl std::str::FromStr for InstanceFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "psd" => Ok(Self::Psd),
            "unitary" => Ok(Self::Unitary),
            other => Err(format!("unknown family `{other}` (gaussian, psd, unitary)")),
        }
    }
}

/// Standard complex Gaussian: real and imaginary parts N(0, 1/2).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let m = DMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    ComplexMatrix::from_raw(m)
}

/// Wishart-type PSD matrix `G G* / d`.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, dim);
    (&g * &g.adjoint()).scale_re(1.0 / dim as f64).hermitian_part()
}

/// Haar unitary via QR with the phases of `R`'s diagonal removed.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, dim).into_dmatrix();
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_raw(q)
}

pub fn random_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    family: InstanceFamily,
) -> ComplexMatrix {
    match family {
        InstanceFamily::Gaussian => gaussian_matrix(rng, dim),
        InstanceFamily::Psd => random_psd(rng, dim),
        InstanceFamily::Unitary => random_unitary(rng, dim),
    }
}

pub fn random_tuple<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    n: usize,
    family: InstanceFamily,
) -> MatrixTuple {
    let mats = (0..n).map(|_| random_matrix(rng, dim, family)).collect();
    MatrixTuple::from_raw(dim, mats)
}
