//! Limited-memory BFGS with Armijo backtracking, for the smooth surrogate
//! objectives of the analytic-candidate solver.

use std::collections::VecDeque;

pub(crate) struct Outcome {
    pub iterations: usize,
    /// Stopped on a small gradient or a flat objective, not on the budget.
    pub stationary: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `f` from `x` in place. `f` returns the value and writes the
/// gradient into its second argument. `observe` sees every accepted iterate.
pub(crate) fn minimize(
    x: &mut [f64],
    max_iters: usize,
    tol: f64,
    memory: usize,
    mut f: impl FnMut(&[f64], &mut [f64]) -> f64,
    mut observe: impl FnMut(&[f64]),
) -> Outcome {
    let n = x.len();
    let mut grad = vec![0.0; n];
    let mut value = f(x, &mut grad);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut dir = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial_grad = vec![0.0; n];
    let gnorm0 = dot(&grad, &grad).sqrt().max(f64::MIN_POSITIVE);
    let mut flat = 0;
    for it in 0..max_iters {
        let gnorm = dot(&grad, &grad).sqrt();
        if gnorm <= 1e-12 * gnorm0 || gnorm == 0.0 {
            return Outcome {
                iterations: it,
                stationary: true,
            };
        }
        // two-loop recursion
        dir.copy_from_slice(&grad);
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &dir);
            for (d, yi) in dir.iter_mut().zip(y) {
                *d -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let gamma = dot(s, y) / dot(y, y);
            for d in dir.iter_mut() {
                *d *= gamma;
            }
        } else {
            let scale = 1.0 / gnorm;
            for d in dir.iter_mut() {
                *d *= scale;
            }
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &dir);
            for (d, si) in dir.iter_mut().zip(s) {
                *d += (a - b) * si;
            }
        }
        for d in dir.iter_mut() {
            *d = -*d;
        }
        let mut slope = dot(&grad, &dir);
        if slope >= 0.0 {
            history.clear();
            for (d, g) in dir.iter_mut().zip(&grad) {
                *d = -g / gnorm;
            }
            slope = -gnorm;
        }

        let mut step = 1.0;
        let mut accepted = false;
        let mut trial_value = value;
        for _ in 0..40 {
            for i in 0..n {
                trial[i] = x[i] + step * dir[i];
            }
            trial_value = f(&trial, &mut trial_grad);
            if trial_value.is_finite() && trial_value <= value + 1e-4 * step * slope {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Outcome {
                iterations: it,
                stationary: true,
            };
        }
        let s: Vec<f64> = (0..n).map(|i| trial[i] - x[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| trial_grad[i] - grad[i]).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if history.len() == memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        x.copy_from_slice(&trial);
        grad.copy_from_slice(&trial_grad);
        let change = (value - trial_value).abs();
        value = trial_value;
        observe(x);
        if change <= tol * value.abs().max(f64::MIN_POSITIVE) {
            flat += 1;
            if flat >= 5 {
                return Outcome {
                    iterations: it + 1,
                    stationary: true,
                };
            }
        } else {
            flat = 0;
        }
    }
    Outcome {
        iterations: max_iters,
        stationary: false,
    }
}
