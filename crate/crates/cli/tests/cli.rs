use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ncinterp_cli::{load_tuple, save_tuple, Report, TupleFile};
use ncinterp_core::{ComplexMatrix, MatrixTuple};

fn ncinterp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncinterp"))
        .args(args)
        .env_remove("NCINTERP_THREADS")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

const IDENTITY_PAIR: &str = r#"{"d": 2, "n": 2, "entries": [
  [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
  [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]
]}"#;

#[test]
fn identity_pair_loads() {
    let dir = tempfile::tempdir().unwrap();
    let x = load_tuple(Path::new(&write(dir.path(), "t.json", IDENTITY_PAIR))).unwrap();
    let id = ComplexMatrix::identity(2);
    assert_eq!(x, MatrixTuple::new(vec![id.clone(), id]).unwrap());
}

#[test]
fn save_load_roundtrip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncinterp(&["gen", "--d", "3", "--n", "2", "--seed", "11"]);
    assert!(out.status.success());
    let path = write(dir.path(), "a.json", std::str::from_utf8(&out.stdout).unwrap());
    let x = load_tuple(Path::new(&path)).unwrap();
    let again = dir.path().join("b.json");
    save_tuple(&x, &again).unwrap();
    assert_eq!(load_tuple(&again).unwrap(), x);
    assert_eq!(fs::read_to_string(&path).unwrap(), fs::read_to_string(&again).unwrap());
}

#[test]
fn shape_errors_name_the_offending_entry() {
    let dir = tempfile::tempdir().unwrap();
    let short = write(
        dir.path(),
        "short.json",
        r#"{"d": 2, "n": 3, "entries": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#,
    );
    let err = load_tuple(Path::new(&short)).unwrap_err().to_string();
    assert!(err.contains("n = 3") && err.contains("1 entries"), "{err}");

    let ragged = write(
        dir.path(),
        "ragged.json",
        r#"{"d": 2, "n": 2, "entries": [[[[1,0],[0,0]],[[0,0],[1,0]]], [[[1,0],[0,0]],[[0,0]]]]}"#,
    );
    let err = load_tuple(Path::new(&ragged)).unwrap_err().to_string();
    assert!(err.contains("entry 1, row 1"), "{err}");

    let out = ncinterp(&["compute", "--input", &ragged, "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn p2_alpha_is_the_hilbert_schmidt_norm() {
    let dir = tempfile::tempdir().unwrap();
    let gen = ncinterp(&["gen", "--d", "3", "--n", "3", "--seed", "5"]);
    let path = write(dir.path(), "t.json", std::str::from_utf8(&gen.stdout).unwrap());
    let file: TupleFile = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let hs: f64 = file
        .entries
        .iter()
        .flatten()
        .flatten()
        .map(|[re, im]| re * re + im * im)
        .sum::<f64>()
        .sqrt();

    let out = ncinterp(&["compute", "--input", &path, "--p", "2", "--theta", "0.3", "--method", "alpha"]);
    assert!(out.status.success());
    let report = Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let est = &report.estimates["alpha"];
    assert!((est.value - hs).abs() <= 1e-12 * hs, "{} vs {hs}", est.value);
    assert!(est.converged);
    assert_eq!(est.iterations, 0);
}

#[test]
fn compute_is_deterministic_and_reports_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let gen = ncinterp(&["gen", "--seed", "2"]);
    let path = write(dir.path(), "t.json", std::str::from_utf8(&gen.stdout).unwrap());
    let args = [
        "compute", "--input", &path, "--p", "inf", "--theta", "0.5", "--method", "sandwich", "--degree", "4",
        "--samples", "64", "--seed", "9",
    ];
    let a = ncinterp(&args);
    let b = ncinterp(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = std::str::from_utf8(&a.stdout).unwrap();
    let report = Report::from_json(text).unwrap();
    assert_eq!(report.config.seed, 9);
    assert_eq!(report.config.degree, 4);
    let lower = report.estimates["lower"].value;
    let upper = report.estimates["upper"].value;
    assert!(lower <= upper * (1.0 + 1e-6));
    assert_eq!(Report::from_json(&report.to_json()).unwrap(), report);
    assert_eq!(report.to_json(), text.trim_end());
}

#[test]
fn certificate_outside_its_regime_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "t.json", IDENTITY_PAIR);
    let out = ncinterp(&["compute", "--input", &path, "--p", "4", "--method", "certificate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p <= 2"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(ncinterp(&["compute", "--input", "/nonexistent.json", "--p", "2"]).status.code(), Some(2));
    assert_eq!(ncinterp(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(ncinterp(&["gen", "--d", "0"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_ncinterp"))
        .args(["gen"])
        .env("NCINTERP_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn duality_suite_passes_with_threads_capped() {
    let out = Command::new(env!("CARGO_BIN_EXE_ncinterp"))
        .args(["verify", "--suite", "duality", "--d", "2", "--n", "2", "--trials", "30", "--seed", "7"])
        .env("NCINTERP_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert!(report.passed);
    assert_eq!(report.trials.len(), 30);
    assert!(report.trials.iter().enumerate().all(|(i, t)| t.index == i && t.seed == 7 + i as u64));
}

#[test]
fn endpoint_and_corollary_suites_pass() {
    for suite in ["endpoints", "corollary"] {
        let out = ncinterp(&["verify", "--suite", suite, "--d", "3", "--n", "2", "--trials", "10"]);
        assert_eq!(out.status.code(), Some(0), "{suite}");
    }
}
