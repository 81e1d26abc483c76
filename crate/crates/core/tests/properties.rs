use ncinterp_core::interp::{oracle_lower, oracle_upper, sandwich};
use ncinterp_core::linalg::{psd_power, schatten_norm, trace_pairing};
use ncinterp_core::pisier::{build_superoperator, superop_norm};
use ncinterp_core::random::{
    gaussian_matrix, random_psd, random_tuple, random_unitary, seeded_rng, InstanceFamily,
};
use ncinterp_core::szego::{build_certificate, random_trig_boundary, wilson_factorize};
use ncinterp_core::tuple_norms::{column_norm, row_norm};
use ncinterp_core::variational::{
    alpha, alpha_inf, alpha_sup, alpha_sup_history, derive_exponents, Witness, TOL_FACT,
};
use ncinterp_core::{ComplexMatrix, Config, Exponent, MatrixTuple, C64};
use proptest::prelude::*;

const EXPONENTS: [&str; 7] = ["1", "4/3", "3/2", "2", "3", "4", "inf"];

fn exponent() -> impl Strategy<Value = Exponent> {
    prop::sample::select(EXPONENTS.to_vec()).prop_map(|s| s.parse().unwrap())
}

fn tuple(seed: u64, d: usize, n: usize) -> MatrixTuple {
    random_tuple(&mut seeded_rng(seed), d, n, InstanceFamily::Gaussian)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn light() -> Config {
    Config {
        restarts: 2,
        ..Config::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schatten_is_a_norm(seed in any::<u64>(), d in 1usize..4, p in exponent(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let mut rng = seeded_rng(seed);
        let a = gaussian_matrix(&mut rng, d);
        let b = gaussian_matrix(&mut rng, d);
        let na = schatten_norm(&a, p).unwrap();
        let nb = schatten_norm(&b, p).unwrap();
        let nab = schatten_norm(&(&a + &b), p).unwrap();
        prop_assert!(nab <= (na + nb) * (1.0 + 1e-10));
        let lambda = C64::new(re, im);
        let scaled = schatten_norm(&a.scale(lambda), p).unwrap();
        prop_assert!((scaled - lambda.norm() * na).abs() <= 1e-10 * (1.0 + scaled));
    }

    #[test]
    fn holder_inequality(seed in any::<u64>(), d in 1usize..4, p in exponent()) {
        let mut rng = seeded_rng(seed);
        let a = gaussian_matrix(&mut rng, d);
        let b = gaussian_matrix(&mut rng, d);
        let lhs = (&a * &b).trace().norm();
        let rhs = schatten_norm(&a, p).unwrap() * schatten_norm(&b, p.conjugate()).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-10));
    }

    #[test]
    fn schatten_unitary_invariance(seed in any::<u64>(), d in 1usize..4, p in exponent()) {
        let mut rng = seeded_rng(seed);
        let m = gaussian_matrix(&mut rng, d);
        let u = random_unitary(&mut rng, d);
        let v = random_unitary(&mut rng, d);
        let a = schatten_norm(&m, p).unwrap();
        let b = schatten_norm(&(&(&u * &m) * &v), p).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
    }

    #[test]
    fn psd_powers_compose(seed in any::<u64>(), d in 1usize..4, s in -1.5f64..1.5, t in -1.5f64..1.5) {
        let mut rng = seeded_rng(seed);
        let m = &random_psd(&mut rng, d) + &ComplexMatrix::identity(d).scale_re(0.1);
        let lhs = &psd_power(&m, s).unwrap() * &psd_power(&m, t).unwrap();
        let rhs = psd_power(&m, s + t).unwrap();
        prop_assert!((&lhs - &rhs).max_abs() <= 1e-9 * rhs.max_abs().max(1.0));
    }

    #[test]
    fn single_entry_tuple_norms(seed in any::<u64>(), d in 1usize..4, p in exponent()) {
        let x = tuple(seed, d, 1);
        let s = schatten_norm(&x.mats()[0], p).unwrap();
        prop_assert!((column_norm(&x, p).unwrap() - s).abs() <= 1e-12 * s.max(1.0));
        prop_assert!((row_norm(&x, p).unwrap() - s).abs() <= 1e-12 * s.max(1.0));
    }

    #[test]
    fn diagonal_tuples_have_equal_norms(seed in any::<u64>(), d in 1usize..4, n in 1usize..4, p in exponent()) {
        let mut rng = seeded_rng(seed);
        let mats = (0..n)
            .map(|_| {
                let g = gaussian_matrix(&mut rng, d);
                let mut m = ComplexMatrix::zeros(d);
                for i in 0..d {
                    m = &m + &ComplexMatrix::unit(d, i, i).scale(g.get(i, 0));
                }
                m
            })
            .collect();
        let x = MatrixTuple::new(mats).unwrap();
        let c = column_norm(&x, p).unwrap();
        prop_assert!((c - row_norm(&x, p).unwrap()).abs() <= 1e-12 * c.max(1.0));
    }

    #[test]
    fn tuple_norm_triangle(seed in any::<u64>(), d in 1usize..4, n in 1usize..4, p in exponent()) {
        let x = tuple(seed, d, n);
        let y = tuple(seed.wrapping_add(1), d, n);
        let z = x.add(&y).unwrap();
        for f in [column_norm, row_norm] {
            prop_assert!(f(&z, p).unwrap() <= (f(&x, p).unwrap() + f(&y, p).unwrap()) * (1.0 + 1e-9));
        }
    }

    #[test]
    fn column_norm_left_unitary_invariance(seed in any::<u64>(), d in 1usize..4, n in 1usize..4, p in exponent()) {
        let x = tuple(seed, d, n);
        let u = random_unitary(&mut seeded_rng(seed ^ 0xabc), d);
        let ux = x.map(|m| &u * m);
        let xu = x.map(|m| m * &u);
        let c = column_norm(&x, p).unwrap();
        let r = row_norm(&x, p).unwrap();
        prop_assert!((column_norm(&ux, p).unwrap() - c).abs() <= 1e-10 * c.max(1.0));
        prop_assert!((row_norm(&xu, p).unwrap() - r).abs() <= 1e-10 * r.max(1.0));
    }

    #[test]
    fn exponent_identities(p in exponent(), theta in 0.0f64..=1.0) {
        let e = derive_exponents(p, theta).unwrap();
        let inv_max = p.recip().min(p.conjugate().recip());
        prop_assert!((e.r.recip() - (1.0 - 2.0 * inv_max)).abs() < 1e-14);
        prop_assert!((e.r0.recip() - theta * e.r.recip() / 2.0).abs() < 1e-14);
        prop_assert!((e.r1.recip() - (1.0 - theta) * e.r.recip() / 2.0).abs() < 1e-14);
        if p.recip() >= 0.5 {
            prop_assert!((e.r0.recip() + 0.5 + e.r1.recip() - p.recip()).abs() < 1e-14);
        }
        if p.recip() <= 0.5 {
            prop_assert!((e.r0.recip() + p.recip() + e.r1.recip() - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn superoperator_positivity(seed in any::<u64>(), d in 1usize..4, n in 1usize..4) {
        let x = tuple(seed, d, n);
        let y = random_psd(&mut seeded_rng(seed ^ 0x55), d);
        let ty = build_superoperator(&x).apply(&y).unwrap();
        prop_assert!(psd_power(&ty, 1.0).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn alpha_homogeneity(seed in any::<u64>(), d in 1usize..4, n in 1usize..4, p in exponent(), theta in 0.0f64..=1.0, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        prop_assume!(re.abs() + im.abs() > 0.1);
        let x = tuple(seed, d, n);
        let lambda = C64::new(re, im);
        let cfg = light();
        let a = alpha(&x, p, theta, &cfg).unwrap().value;
        let b = alpha(&x.scale(lambda), p, theta, &cfg).unwrap().value;
        prop_assert!(rel(b, lambda.norm() * a) <= 1e-9, "{} vs {}", b, lambda.norm() * a);
    }

    #[test]
    fn alpha_unitary_invariance(seed in any::<u64>(), d in 1usize..4, n in 1usize..4, p in exponent(), theta in 0.0f64..=1.0) {
        let x = tuple(seed, d, n);
        let mut rng = seeded_rng(seed ^ 0x77);
        let u = random_unitary(&mut rng, d);
        let v = random_unitary(&mut rng, d);
        let cfg = light();
        let a = alpha(&x, p, theta, &cfg).unwrap().value;
        let b = alpha(&x.sandwich(&u, &v), p, theta, &cfg).unwrap().value;
        prop_assert!(rel(a, b) <= 1e-6, "{} vs {}", a, b);
    }

    #[test]
    fn weak_duality(seed in any::<u64>(), d in 1usize..4, n in 1usize..4, p in exponent(), theta in 0.0f64..=1.0) {
        let x = tuple(seed, d, n);
        let y = tuple(seed.wrapping_mul(31).wrapping_add(7), d, n);
        let cfg = light();
        let ax = alpha(&x, p, theta, &cfg).unwrap().value;
        let ay = alpha(&y, p.conjugate(), theta, &cfg).unwrap().value;
        prop_assert!(trace_pairing(&x, &y).unwrap().norm() <= ax * ay * (1.0 + 1e-9));
    }

    #[test]
    fn endpoint_inequalities(seed in any::<u64>(), d in 1usize..4, n in 1usize..4, p in prop::sample::select(vec!["1", "4/3", "3/2"])) {
        let p: Exponent = p.parse().unwrap();
        let x = tuple(seed, d, n);
        let cfg = light();
        let c = column_norm(&x, p).unwrap();
        let r = row_norm(&x, p).unwrap();
        prop_assert!(c <= alpha_inf(&x, p, 0.0, &cfg).unwrap().value * (1.0 + 1e-9));
        prop_assert!(r <= alpha_inf(&x, p, 1.0, &cfg).unwrap().value * (1.0 + 1e-9));
    }

    #[test]
    fn log_convexity_bound(seed in any::<u64>(), d in 1usize..4, n in 1usize..4, theta in 0.0f64..=1.0) {
        let x = tuple(seed, d, n);
        let a = alpha_sup(&x, Exponent::INFINITY, theta, &light()).unwrap().value;
        let c = x.column_gram().spectral_norm();
        let r = x.row_gram().spectral_norm();
        prop_assert!(a * a <= c.powf(1.0 - theta) * r.powf(theta) * (1.0 + 1e-9));
    }

    #[test]
    fn monotone_ascent(seed in any::<u64>(), d in 1usize..4, n in 1usize..4, p in prop::sample::select(vec!["3", "4", "inf"]), theta in 0.0f64..=1.0) {
        let p: Exponent = p.parse().unwrap();
        let x = tuple(seed, d, n);
        let h = alpha_sup_history(&x, p, theta, &Config::default()).unwrap();
        for w in h.windows(2) {
            prop_assert!(w[1] >= w[0] * (1.0 - 1e-12));
        }
    }

    #[test]
    fn factorization_witnesses_reconstruct(seed in any::<u64>(), d in 1usize..4, n in 1usize..4, p in prop::sample::select(vec!["1", "4/3", "3/2"]), theta in 0.0f64..=1.0) {
        let p: Exponent = p.parse().unwrap();
        let x = tuple(seed, d, n);
        let est = alpha_inf(&x, p, theta, &light()).unwrap();
        let f = est.factorization().unwrap();
        prop_assert!(f.reconstruction_error(&x).unwrap() <= TOL_FACT);
        let ex = derive_exponents(p, theta).unwrap();
        let objective = schatten_norm(&f.a, ex.r0).unwrap() * schatten_norm(&f.b, ex.r1).unwrap() * f.ys.hs_norm();
        prop_assert!(rel(objective, est.value) <= 1e-12);
    }

    #[test]
    fn unit_ball_witnesses_reproduce_value(seed in any::<u64>(), d in 1usize..4, n in 1usize..4, p in prop::sample::select(vec!["3", "4", "inf"]), theta in 0.0f64..=1.0) {
        let p: Exponent = p.parse().unwrap();
        let x = tuple(seed, d, n);
        let est = alpha_sup(&x, p, theta, &light()).unwrap();
        let ex = derive_exponents(p, theta).unwrap();
        let Some(Witness::UnitBall { a, b }) = &est.witness else {
            return Err(TestCaseError::fail("missing witness"));
        };
        prop_assert!(schatten_norm(a, ex.r0).unwrap() <= 1.0 + 1e-9);
        prop_assert!(schatten_norm(b, ex.r1).unwrap() <= 1.0 + 1e-9);
        prop_assert!(rel(x.sandwich(a, b).hs_norm(), est.value) <= 1e-12);
    }

    #[test]
    fn superoperator_interpolation_and_adjoint(seed in any::<u64>(), d in 1usize..4, n in 1usize..4, p in prop::sample::select(vec!["4/3", "3/2", "3", "4"])) {
        let p: Exponent = p.parse().unwrap();
        let t = build_superoperator(&tuple(seed, d, n));
        let cfg = Config::default();
        let n1 = superop_norm(&t, Exponent::ONE, &cfg).unwrap().value;
        let ninf = superop_norm(&t, Exponent::INFINITY, &cfg).unwrap().value;
        let np = superop_norm(&t, p, &cfg).unwrap().value;
        prop_assert!(np <= n1.powf(p.recip()) * ninf.powf(1.0 - p.recip()) * (1.0 + 1e-9));
        let adj = superop_norm(&t.adjoint(), p.conjugate(), &cfg).unwrap().value;
        prop_assert!(rel(np, adj) <= 1e-6, "{} vs {}", np, adj);
    }

    #[test]
    fn spectral_factorization_identity(seed in any::<u64>(), d in 1usize..4, degree in 0usize..4) {
        let f = random_trig_boundary(&mut seeded_rng(seed), d, degree, 0.1, 64).unwrap();
        let fact = wilson_factorize(&f, 32, &Config::default()).unwrap();
        prop_assert!(fact.residual <= 1e-6, "{}", fact.residual);
        prop_assert_eq!(fact.winding, 0);
        prop_assert_eq!(fact.factor.winding_number(1.0 - 1e-8, 512), 0);
    }
}

fn oracle_cfg() -> Config {
    Config {
        restarts: 2,
        oracle_iters: 60,
        ..Config::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn oracle_upper_nonincreasing_in_degree(seed in any::<u64>(), p in exponent(), theta in 0.1f64..0.9, degree in 0usize..4) {
        let x = tuple(seed, 2, 2);
        let cfg = oracle_cfg();
        let lo = oracle_upper(&x, p, theta, degree, 32, &cfg).unwrap().estimate.value;
        let hi = oracle_upper(&x, p, theta, degree + 2, 32, &cfg).unwrap().estimate.value;
        prop_assert!(hi <= lo + 1e-9, "{} > {}", hi, lo);
    }

    #[test]
    fn oracle_weak_duality(seed in any::<u64>(), p in exponent(), theta in 0.1f64..0.9) {
        let x = tuple(seed, 2, 2);
        let cfg = oracle_cfg();
        let up = oracle_upper(&x, p, theta, 4, 64, &cfg).unwrap().estimate.value;
        let lo = oracle_lower(&x, p, theta, &cfg).unwrap().value;
        prop_assert!(lo <= up * (1.0 + 1e-6));
    }

    #[test]
    fn sandwich_reflection_symmetry(seed in any::<u64>(), p in exponent(), theta in 0.1f64..0.9) {
        let x = tuple(seed, 2, 2);
        let cfg = Config { degree: 4, samples: 64, ..oracle_cfg() };
        let a = sandwich(&x, p, theta, &cfg).unwrap();
        let b = sandwich(&x.adjoint(), p, 1.0 - theta, &cfg).unwrap();
        prop_assert!(rel(a.lower.value, b.lower.value) <= 1e-6, "{} {}", a.lower.value, b.lower.value);
        prop_assert!(rel(a.alpha.value, b.alpha.value) <= 1e-6, "{} {}", a.alpha.value, b.alpha.value);
        prop_assert!(rel(a.upper.value, b.upper.value) <= 1e-6, "{} {}", a.upper.value, b.upper.value);
    }

    #[test]
    fn certificates_reconstruct_and_contract(seed in any::<u64>(), p in prop::sample::select(vec!["1", "4/3"]), theta in 0.2f64..0.8) {
        let p: Exponent = p.parse().unwrap();
        let x = tuple(seed, 2, 2);
        let cert = build_certificate(&x, p, theta, &Config { degree: 4, samples: 64, ..oracle_cfg() }).unwrap();
        prop_assert!(cert.reconstruction_error <= TOL_FACT);
        prop_assert!(cert.contraction <= 1.0 + 1e-8);
        prop_assert_eq!((cert.winding_a, cert.winding_b), (0, 0));
    }
}
