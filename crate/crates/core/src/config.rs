use serde::{Deserialize, Serialize};

/// Solver knobs shared by every estimator. All runs are deterministic given
/// the configuration (including `seed`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Relative stopping tolerance of the alternating schemes.
    pub tol: f64,
    pub max_iters: usize,
    /// Random restarts on top of the deterministic start.
    pub restarts: usize,
    /// Acceptable relative gap between two-sided estimates.
    pub gap_tol: f64,
    pub seed: u64,
    /// Polynomial degree of analytic candidates.
    pub degree: usize,
    /// Boundary samples for the analytic-candidate minimax.
    pub samples: usize,
    /// Iteration budget of each smoothing stage of the candidate solver.
    pub oracle_iters: usize,
    /// Gradient steps of the duality ascent.
    pub ascent_iters: usize,
    /// Initial Fourier cutoff of spectral factorization.
    pub cutoff: usize,
    pub max_cutoff: usize,
    /// Residual target of spectral factorization (relative).
    pub szego_tol: f64,
    /// Regularization added to boundary Gram matrices, relative to the
    /// squared boundary norm.
    pub epsilon: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 500,
            restarts: 8,
            gap_tol: 5e-2,
            seed: 0,
            degree: 8,
            samples: 256,
            oracle_iters: 150,
            ascent_iters: 30,
            cutoff: 64,
            max_cutoff: 512,
            szego_tol: 1e-6,
            epsilon: 1e-8,
        }
    }
}
