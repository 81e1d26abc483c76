use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use ncinterp_core::interp::{oracle_lower, oracle_upper, sandwich, ORDER_TOL};
use ncinterp_core::linalg::trace_pairing;
use ncinterp_core::pisier::corollary_check;
use ncinterp_core::random::{random_tuple, seeded_rng, InstanceFamily};
use ncinterp_core::szego::{build_certificate, random_trig_boundary, wilson_factorize, Certificate};
use ncinterp_core::tuple_norms::{column_norm, row_norm};
use ncinterp_core::variational::{alpha, alpha_inf, derive_exponents};
use ncinterp_core::{Config, Exponent, MatrixTuple, C64};
use rayon::prelude::*;

use crate::report::{Check, Instance, Report, Trial};
use crate::tuple_file::load_tuple;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Alpha,
    Oracle,
    Pisier,
    Certificate,
    Sandwich,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Duality,
    Sandwich,
    Corollary,
    Szego,
    Endpoints,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Self::Alpha => "alpha",
            Self::Oracle => "oracle",
            Self::Pisier => "pisier",
            Self::Certificate => "certificate",
            Self::Sandwich => "sandwich",
        }
    }
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Self::Duality => "duality",
            Self::Sandwich => "sandwich",
            Self::Corollary => "corollary",
            Self::Szego => "szego",
            Self::Endpoints => "endpoints",
        }
    }
}

pub struct ComputeArgs {
    pub input: PathBuf,
    pub p: Option<Exponent>,
    pub theta: f64,
    pub method: Method,
    pub cfg: Config,
    pub timings: bool,
}

pub struct VerifyArgs {
    pub suite: Suite,
    pub d: usize,
    pub n: usize,
    pub trials: usize,
    pub p: Option<Exponent>,
    pub theta: Option<f64>,
    pub family: InstanceFamily,
    pub cfg: Config,
    pub timings: bool,
}

/// Relative slack of the certificate objective over the oracle's boundary
/// maximum.
const CERTIFICATE_SLACK: f64 = 0.02;
/// Absolute residual target of `ΦΦ* = f` on the samples.
const FACTOR_RESIDUAL: f64 = 1e-6;
const COROLLARY_TOL: f64 = 1e-6;
/// Slack for inequalities that hold exactly up to roundoff.
const ROUNDOFF: f64 = 1e-9;

fn required_p(p: Option<Exponent>, what: &str) -> Result<Exponent, CliError> {
    p.ok_or_else(|| CliError::Usage(format!("{what} needs --p")))
}

fn timed<T>(timings: &mut BTreeMap<String, f64>, name: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    timings.insert(name.to_owned(), start.elapsed().as_secs_f64());
    out
}

fn certificate_checks(cert: &Certificate) -> Vec<Check> {
    vec![
        Check::at_most("reconstruction_error", cert.reconstruction_error, 1e-8),
        Check::at_most("contraction", cert.contraction, 1.0 + 1e-8),
        Check::at_most(
            "objective_over_boundary_max",
            cert.factorization.objective / cert.boundary_max,
            1.0 + CERTIFICATE_SLACK,
        ),
        Check::equal("winding_a", cert.winding_a as f64, 0.0),
        Check::equal("winding_b", cert.winding_b as f64, 0.0),
    ]
}

pub fn run_compute(args: &ComputeArgs) -> Result<Report, CliError> {
    let x = load_tuple(&args.input)?;
    let cfg = &args.cfg;
    let theta = args.theta;
    let p = match args.method {
        Method::Pisier => {
            let p = args.p.unwrap_or(Exponent::INFINITY);
            if !p.is_infinite() {
                return Err(CliError::Usage("method pisier computes the p = inf norm".into()));
            }
            p
        }
        m => required_p(args.p, &format!("method {}", m.name()))?,
    };
    derive_exponents(p, theta)?;
    let instance = Instance {
        d: x.dim(),
        n: x.len(),
        p: Some(p),
        theta: Some(theta),
        seed: cfg.seed,
    };
    let mut report = Report::new("compute", args.method.name(), instance, cfg.clone());
    let mut timings = BTreeMap::new();
    match args.method {
        Method::Alpha => {
            let est = timed(&mut timings, "alpha", || alpha(&x, p, theta, cfg))?;
            report.estimates.insert("alpha".into(), est);
        }
        Method::Oracle => {
            let upper = timed(&mut timings, "upper", || {
                oracle_upper(&x, p, theta, cfg.degree, cfg.samples, cfg)
            })?;
            let lower = timed(&mut timings, "lower", || oracle_lower(&x, p, theta, cfg))?;
            let gap = (upper.estimate.value - lower.value) / upper.estimate.value.max(f64::MIN_POSITIVE);
            report.gaps.insert("relative_gap".into(), gap);
            report.checks.push(Check::at_most(
                "lower_over_upper",
                lower.value / upper.estimate.value,
                1.0 + ORDER_TOL,
            ));
            report.estimates.insert("lower".into(), lower);
            report.estimates.insert("upper".into(), upper.estimate);
        }
        Method::Sandwich => {
            let s = timed(&mut timings, "sandwich", || sandwich(&x, p, theta, cfg))?;
            report.gaps.insert("relative_gap".into(), s.relative_gap);
            report.gaps.insert("alpha_position".into(), s.alpha_position);
            report.checks.push(Check::at_most("relative_gap", s.relative_gap, cfg.gap_tol));
            report.estimates.insert("lower".into(), s.lower);
            report.estimates.insert("alpha".into(), s.alpha);
            report.estimates.insert("upper".into(), s.upper);
        }
        Method::Pisier => {
            let c = timed(&mut timings, "corollary", || corollary_check(&x, theta, cfg))?;
            report.gaps.insert("deviation".into(), c.deviation);
            report.estimates.insert("alpha".into(), c.alpha.clone());
            report.estimates.insert("superoperator".into(), c.superop.clone());
            report.corollary = Some(c);
        }
        Method::Certificate => {
            if p.recip() < 0.5 {
                return Err(CliError::Usage("method certificate needs p <= 2".into()));
            }
            let cert = timed(&mut timings, "certificate", || build_certificate(&x, p, theta, cfg))?;
            report.gaps.insert("eta".into(), cert.eta);
            report.checks.extend(certificate_checks(&cert));
            report.certificate = Some(cert);
        }
    }
    if args.timings {
        report.timings = Some(timings);
    }
    report.finish();
    Ok(report)
}

const SUITE_EXPONENTS: [&str; 7] = ["1", "4/3", "3/2", "2", "3", "4", "inf"];
const INF_REGIME: [&str; 4] = ["1", "4/3", "3/2", "2"];
const SUITE_THETAS: [f64; 3] = [0.25, 0.5, 0.75];

fn cycle(list: &[&str], i: usize) -> Exponent {
    list[i % list.len()].parse().expect("valid exponent literal")
}

fn run_trial(args: &VerifyArgs, index: usize, seed: u64) -> Result<(Instance, Vec<Check>), CliError> {
    let cfg = &args.cfg;
    let (d, n) = (args.d, args.n);
    let mut rng = seeded_rng(seed);
    let theta = args.theta.unwrap_or(SUITE_THETAS[index % SUITE_THETAS.len()]);
    let mut instance = Instance {
        d,
        n,
        p: None,
        theta: Some(theta),
        seed,
    };
    let mut checks = Vec::new();
    match args.suite {
        Suite::Duality => {
            let p = args.p.unwrap_or_else(|| cycle(&SUITE_EXPONENTS, index));
            instance.p = Some(p);
            let x = random_tuple(&mut rng, d, n, args.family);
            let y = random_tuple(&mut rng, d, n, args.family);
            let pairing = trace_pairing(&x, &y)?.norm();
            let bound = alpha(&x, p, theta, cfg)?.value * alpha(&y, p.conjugate(), theta, cfg)?.value;
            checks.push(Check::at_most("pairing_over_bound", pairing / bound, 1.0 + ROUNDOFF));
        }
        Suite::Sandwich => {
            let p = args.p.unwrap_or_else(|| cycle(&SUITE_EXPONENTS, index));
            instance.p = Some(p);
            let x = random_tuple(&mut rng, d, n, args.family);
            let s = sandwich(&x, p, theta, cfg)?;
            checks.push(Check::at_most("relative_gap", s.relative_gap, cfg.gap_tol));
            checks.push(Check::at_most("lower_over_alpha", s.lower.value / s.alpha.value, 1.0 + ORDER_TOL));
            let slack = if p.recip() >= 0.5 { cfg.gap_tol } else { ORDER_TOL };
            checks.push(Check::at_most("alpha_over_upper", s.alpha.value / s.upper.value, 1.0 + slack));
        }
        Suite::Corollary => {
            let x = random_tuple(&mut rng, d, n, args.family);
            let theta = args.theta.unwrap_or(0.5);
            instance.theta = Some(theta);
            instance.p = Some(Exponent::INFINITY);
            let c = corollary_check(&x, theta, cfg)?;
            checks.push(Check::at_most("deviation", c.deviation, COROLLARY_TOL));
        }
        Suite::Szego => {
            let f = random_trig_boundary(&mut rng, d, 3, 0.1, 2 * cfg.cutoff)?;
            let fact = wilson_factorize(&f, cfg.cutoff, cfg)?;
            let mut residual = 0.0_f64;
            for (omega, value) in &f.samples {
                let phi = fact.factor.eval(C64::from_polar(1.0, *omega));
                residual = residual.max((&(&phi * &phi.adjoint()) - value).spectral_norm());
            }
            checks.push(Check::at_most("factorization_residual", residual, FACTOR_RESIDUAL));
            checks.push(Check::equal("winding", fact.winding as f64, 0.0));
            let p = args.p.unwrap_or(Exponent::ONE);
            if p.recip() >= 0.5 && theta > 0.0 && theta < 1.0 {
                instance.p = Some(p);
                let x = random_tuple(&mut rng, d, n, args.family);
                checks.extend(certificate_checks(&build_certificate(&x, p, theta, cfg)?));
            }
        }
        Suite::Endpoints => {
            let p = args.p.unwrap_or_else(|| cycle(&INF_REGIME, index));
            if p.recip() < 0.5 {
                return Err(CliError::Usage("suite endpoints needs p <= 2".into()));
            }
            instance.p = Some(p);
            instance.theta = None;
            let x = random_tuple(&mut rng, d, n, args.family);
            let c = column_norm(&x, p)?;
            let r = row_norm(&x, p)?;
            checks.push(Check::at_most(
                "column_over_alpha_at_0",
                c / alpha_inf(&x, p, 0.0, cfg)?.value,
                1.0 + ROUNDOFF,
            ));
            checks.push(Check::at_most(
                "row_over_alpha_at_1",
                r / alpha_inf(&x, p, 1.0, cfg)?.value,
                1.0 + ROUNDOFF,
            ));
        }
    }
    Ok((instance, checks))
}

pub fn run_verify(args: &VerifyArgs) -> Result<Report, CliError> {
    if args.d == 0 || args.n == 0 || args.trials == 0 {
        return Err(CliError::Usage("--d, --n and --trials must be positive".into()));
    }
    if let Some(theta) = args.theta {
        if !(0.0..=1.0).contains(&theta) {
            return Err(CliError::Usage(format!("theta = {theta} is outside [0, 1]")));
        }
    }
    let base = args.cfg.seed;
    let start = Instant::now();
    let results: Vec<_> = (0..args.trials)
        .into_par_iter()
        .map(|index| {
            let seed = base.wrapping_add(index as u64);
            run_trial(args, index, seed).map(|(instance, checks)| Trial {
                index,
                seed,
                instance,
                passed: checks.iter().all(|c| c.passed),
                checks,
            })
        })
        .collect();
    let trials = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let instance = Instance {
        d: args.d,
        n: args.n,
        p: args.p,
        theta: args.theta,
        seed: base,
    };
    let mut report = Report::new("verify", args.suite.name(), instance, args.cfg.clone());
    report.trials = trials;
    if args.timings {
        report.timings = Some(BTreeMap::from([("total".to_owned(), start.elapsed().as_secs_f64())]));
    }
    report.finish();
    Ok(report)
}

pub fn generate(d: usize, n: usize, seed: u64, family: InstanceFamily) -> Result<MatrixTuple, CliError> {
    if d == 0 || n == 0 {
        return Err(CliError::Usage("--d and --n must be positive".into()));
    }
    Ok(random_tuple(&mut seeded_rng(seed), d, n, family))
}
