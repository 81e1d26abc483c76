use ncinterp_wasm::{alpha_curve, corollary_view, random_instance, sandwich_view};
use serde_json::Value;

fn field(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap()
}

#[test]
fn curve_hits_the_endpoint_norms() {
    let x = random_instance(2, 3, 1).unwrap();
    let v: Value = serde_json::from_str(&alpha_curve(&x, "inf", 4).unwrap()).unwrap();
    let alpha = v["alpha"].as_array().unwrap();
    assert_eq!(alpha.len(), 5);
    let first = alpha[0].as_f64().unwrap();
    let last = alpha[4].as_f64().unwrap();
    assert!((first - field(&v, "column")).abs() < 1e-6 * first);
    assert!((last - field(&v, "row")).abs() < 1e-6 * last);
}

#[test]
fn sandwich_profile_covers_both_sides() {
    let x = random_instance(2, 2, 3).unwrap();
    let v: Value = serde_json::from_str(&sandwich_view(&x, "4", 0.5, 4, 64).unwrap()).unwrap();
    assert!(field(&v, "lower") <= field(&v, "upper") * (1.0 + 1e-6));
    let profile = v["profile"].as_array().unwrap();
    assert_eq!(profile.len(), 64);
    let max = profile.iter().map(|q| q["norm"].as_f64().unwrap()).fold(0.0, f64::max);
    assert!(max <= field(&v, "upper") * (1.0 + 1e-9));
    assert!(profile.iter().any(|q| q["row_side"] == true) && profile.iter().any(|q| q["row_side"] == false));
}

#[test]
fn corollary_at_one_half_is_tight() {
    let x = random_instance(3, 2, 5).unwrap();
    let v: Value = serde_json::from_str(&corollary_view(&x, 0.5).unwrap()).unwrap();
    assert_eq!(field(&v, "p"), 2.0);
    assert!(field(&v, "deviation") < 1e-6);
}

#[test]
fn bad_input_is_reported() {
    assert!(alpha_curve("[]", "2", 4).is_err());
    assert!(alpha_curve(&random_instance(2, 2, 0).unwrap(), "1/2", 4).is_err());
    assert!(random_instance(0, 2, 0).is_err());
}
