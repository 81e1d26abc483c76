//! Browser bindings. Tuples travel as JSON arrays of matrices, each matrix a
//! list of rows of `[re, im]` pairs; every export returns a JSON string.

use ncinterp_core::interp::{oracle_lower, oracle_upper, strip_disk_map, Side};
use ncinterp_core::pisier::corollary_check;
use ncinterp_core::random::{random_tuple, seeded_rng, InstanceFamily};
use ncinterp_core::tuple_norms::{column_norm, row_norm};
use ncinterp_core::variational::alpha;
use ncinterp_core::{Config, Exponent, MatrixTuple};
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Outcome = Result<String, String>;

fn parse(tuple: &str, p: &str) -> Result<(MatrixTuple, Exponent), String> {
    let x: MatrixTuple = serde_json::from_str(tuple).map_err(|e| format!("tuple: {e}"))?;
    let p: Exponent = p.parse().map_err(|e| format!("p: {e}"))?;
    Ok((x, p))
}

fn demo_config(degree: usize, samples: usize) -> Config {
    Config {
        degree,
        samples,
        restarts: 4,
        ..Config::default()
    }
}

fn to_json(value: &impl Serialize) -> Outcome {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

pub fn random_instance(d: usize, n: usize, seed: u64) -> Outcome {
    if d == 0 || n == 0 || d > 6 || n > 8 {
        return Err("need 1 <= d <= 6 and 1 <= n <= 8".into());
    }
    to_json(&random_tuple(&mut seeded_rng(seed), d, n, InstanceFamily::Gaussian))
}

#[derive(Serialize)]
struct Curve {
    thetas: Vec<f64>,
    alpha: Vec<f64>,
    column: f64,
    row: f64,
}

/// `θ ↦ α_{p,θ}(x)` on `steps + 1` equispaced points of `[0, 1]`.
pub fn alpha_curve(tuple: &str, p: &str, steps: usize) -> Outcome {
    let (x, p) = parse(tuple, p)?;
    let steps = steps.clamp(1, 200);
    let cfg = demo_config(0, 0);
    let thetas: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
    let alpha = thetas
        .iter()
        .map(|&t| alpha(&x, p, t, &cfg).map(|e| e.value))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    to_json(&Curve {
        thetas,
        alpha,
        column: column_norm(&x, p).map_err(|e| e.to_string())?,
        row: row_norm(&x, p).map_err(|e| e.to_string())?,
    })
}

#[derive(Serialize)]
struct ProfilePoint {
    angle: f64,
    row_side: bool,
    norm: f64,
}

#[derive(Serialize)]
struct SandwichView {
    lower: f64,
    alpha: f64,
    upper: f64,
    relative_gap: f64,
    profile: Vec<ProfilePoint>,
}

/// Lower bound, `α` and upper bound, with the boundary norms of the best
/// analytic candidate around the circle.
pub fn sandwich_view(tuple: &str, p: &str, theta: f64, degree: usize, samples: usize) -> Outcome {
    let (x, p) = parse(tuple, p)?;
    let cfg = demo_config(degree.min(12), samples.clamp(16, 512));
    let lower = oracle_lower(&x, p, theta, &cfg).map_err(|e| e.to_string())?.value;
    let value = alpha(&x, p, theta, &cfg).map_err(|e| e.to_string())?.value;
    let upper = oracle_upper(&x, p, theta, cfg.degree, cfg.samples, &cfg).map_err(|e| e.to_string())?;
    let map = strip_disk_map(theta, cfg.samples).map_err(|e| e.to_string())?;
    let profile = map
        .samples
        .iter()
        .map(|s| {
            upper.candidate.boundary_norm(s.angle, s.side, p).map(|norm| ProfilePoint {
                angle: s.angle,
                row_side: s.side == Side::Row,
                norm,
            })
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let upper_value = upper.estimate.value;
    to_json(&SandwichView {
        lower,
        alpha: value,
        upper: upper_value,
        relative_gap: if upper_value > 0.0 { (upper_value - lower) / upper_value } else { 0.0 },
        profile,
    })
}

#[derive(Serialize)]
struct CorollaryView {
    p: f64,
    alpha_squared: f64,
    superoperator: f64,
    deviation: f64,
}

/// `α_{∞,θ}(x)²` against the norm of `y ↦ Σ x_k* y x_k` on `L_{1/θ}`.
pub fn corollary_view(tuple: &str, theta: f64) -> Outcome {
    let x: MatrixTuple = serde_json::from_str(tuple).map_err(|e| format!("tuple: {e}"))?;
    let r = corollary_check(&x, theta, &demo_config(0, 0)).map_err(|e| e.to_string())?;
    to_json(&CorollaryView {
        p: r.p.value(),
        alpha_squared: r.alpha_squared,
        superoperator: r.superop.value,
        deviation: r.deviation,
    })
}

fn js(out: Outcome) -> Result<String, JsError> {
    out.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = randomInstance)]
pub fn random_instance_js(d: usize, n: usize, seed: u32) -> Result<String, JsError> {
    js(random_instance(d, n, seed as u64))
}

#[wasm_bindgen(js_name = alphaCurve)]
pub fn alpha_curve_js(tuple: &str, p: &str, steps: usize) -> Result<String, JsError> {
    js(alpha_curve(tuple, p, steps))
}

#[wasm_bindgen(js_name = sandwich)]
pub fn sandwich_js(tuple: &str, p: &str, theta: f64, degree: usize, samples: usize) -> Result<String, JsError> {
    js(sandwich_view(tuple, p, theta, degree, samples))
}

#[wasm_bindgen(js_name = corollary)]
pub fn corollary_js(tuple: &str, theta: f64) -> Result<String, JsError> {
    js(corollary_view(tuple, theta))
}
