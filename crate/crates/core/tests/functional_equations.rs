use num_bigint::BigInt;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weilgap::analytic::{
    certify_modularity, check_fe_additive, check_fe_multiplicative, check_modular_relation,
    default_s_grid, gauss_assembly_identity, lambda_additive, lambda_dirichlet,
    lambda_multiplicative, lambda_multiplicative_direct, AdditiveTwist, FEStatement, FeOptions,
    ModCharacter, PhaseSource,
};
use weilgap::multiplier::{Angle, DirichletChar};
use weilgap::series::{delta_coeffs, delta_delta_p, CoeffSeries};
use weilgap::C64;

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

fn level_one(k: i64) -> FEStatement {
    FEStatement::resolve(&PhaseSource::Level1, k, 0, 1).unwrap()
}

#[test]
fn delta_split_agrees_with_dirichlet_series() {
    let delta = delta_coeffs::<f64>(2000);
    let fe = level_one(12);
    for s in [c(14.0, 0.0), c(14.0, 3.0)] {
        let split = lambda_additive(&delta, fe.twist(), s, 1.0, Some((&delta, &fe))).unwrap();
        let direct = lambda_dirichlet(&delta, AdditiveTwist::untwisted(), s).unwrap();
        let rel = (split.value - direct.value).norm() / direct.value.norm();
        assert!(rel < 1e-8, "s = {s}: {} vs {}", split.value, direct.value);
    }
}

#[test]
fn delta_completed_l_function_is_symmetric() {
    let delta = delta_coeffs::<f64>(2000);
    let fe = level_one(12);
    let at = |s: C64, y0: f64| {
        lambda_additive(&delta, fe.twist(), s, y0, Some((&delta, &fe)))
            .unwrap()
            .value
    };
    let centre = at(c(6.0, 0.0), 1.3);
    assert!(centre.im.abs() < 1e-12 * centre.re.abs());
    for s in [c(6.0, 0.0), c(7.0, 1.0), c(9.5, -2.0)] {
        let lhs = at(s, 1.3);
        let rhs = at(c(12.0, 0.0) - s, 0.7);
        assert!((lhs - rhs).norm() < 1e-8 * lhs.norm(), "s = {s}: {lhs} vs {rhs}");
    }
}

#[test]
fn split_point_independence() {
    let delta = delta_coeffs::<f64>(600);
    let (dd5, _) = delta_delta_p::<f64>(5, 600);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let chi5 = DirichletChar::trivial(5).unwrap();
    let forms: [(&CoeffSeries<f64>, PhaseSource, i64); 2] = [
        (&delta, PhaseSource::Level1, 12),
        (&dd5, PhaseSource::Character(&chi5), 24),
    ];
    for (f, source, k) in forms {
        for _ in 0..20 {
            let q = loop {
                let q = rng.gen_range(1..=4u64);
                if q % source.level() != 0 || source.level() == 1 {
                    break q;
                }
            };
            let a = loop {
                let a = rng.gen_range(0..q as i64);
                if num_integer::gcd(a, q as i64) == 1 {
                    break a;
                }
            };
            let fe = FEStatement::resolve(&source, k, a, q).unwrap();
            let s = c(rng.gen_range(0.0..k as f64), rng.gen_range(-3.0..3.0));
            let base = fe.default_y0();
            let vals: Vec<_> = [0.3, 1.0, 3.0]
                .iter()
                .map(|m| lambda_additive(f, fe.twist(), s, m * base, Some((f, &fe))).unwrap())
                .collect();
            for v in &vals[1..] {
                let diff = (v.value - vals[0].value).norm();
                let bar = v.error + vals[0].error + 1e-9 * v.value.norm();
                assert!(diff <= bar, "{}: a/q = {a}/{q}, s = {s}: {diff:e} > {bar:e}", f.label);
            }
        }
    }
}

#[test]
fn fricke_relation_of_delta_delta_five() {
    let (f, g) = delta_delta_p::<f64>(5, 120);
    let fe = FEStatement::new(5, 24, -1, 1, -1, -4, Angle::zero()).unwrap();
    let z = c(0.2, 0.9);
    let r = check_modular_relation(&f, &g, &fe, z).unwrap();
    assert!(r.residual < 1e-8, "{r:?}");
    let bad = f.perturbed(6, 1.0);
    let r = check_modular_relation(&bad, &g, &fe, z).unwrap();
    assert!(r.residual > 1e-3, "{r:?}");
    // the relation read at w = -1/(5z) with f and g exchanged
    let w = -1.0 / (5.0 * z);
    let back = check_modular_relation(&g, &f, &fe, w).unwrap();
    let fwd = check_modular_relation(&f, &g, &fe, z).unwrap();
    assert!((back.residual - fwd.residual).abs() < 1e-8);
}

#[test]
fn additive_fe_for_delta_delta_eleven() {
    let (f, g) = delta_delta_p::<f64>(11, 400);
    let chi = DirichletChar::trivial(11).unwrap();
    let fe = FEStatement::resolve(&PhaseSource::Character(&chi), 24, 1, 3).unwrap();
    let samples = [c(12.0, 0.0), c(12.0, 1.0), c(13.5, 0.0)];
    let report = check_fe_additive(&f, &g, &fe, &samples, &FeOptions::default()).unwrap();
    assert!(report.pass, "{report:#?}");
    assert!(report.max_residual < 1e-6);
    assert!(report.phase_deviation < 1e-6, "{report:#?}");

    let wrong = fe.with_phase(&fe.phase + &Angle::from_ratio(1, 7));
    let bad = check_fe_additive(&f, &g, &wrong, &samples, &FeOptions::default()).unwrap();
    assert!(!bad.pass);
    assert!(bad.max_residual > 0.1);
}

#[test]
fn level_one_reduction_is_hecke_equation() {
    let delta = delta_coeffs::<f64>(800);
    let fe = level_one(12);
    let report =
        check_fe_additive(&delta, &delta, &fe, &default_s_grid(12, 6.0), &FeOptions::default())
            .unwrap();
    assert!(report.pass, "{report:#?}");
}

#[test]
fn dual_twist_depends_on_b_mod_q_only() {
    let (f, g) = delta_delta_p::<f64>(5, 300);
    let chi = DirichletChar::trivial(5).unwrap();
    let fe = FEStatement::resolve(&PhaseSource::Character(&chi), 24, 2, 3).unwrap();
    let shifted = FEStatement::new(5, 24, 2, 3, fe.b + 3, fe.d - 10, fe.phase.clone()).unwrap();
    assert_eq!(fe.dual_twist(), shifted.dual_twist());
    let s = c(12.5, 0.5);
    let a = lambda_additive(&f, fe.twist(), s, 0.1, Some((&g, &fe))).unwrap();
    let b = lambda_additive(&f, fe.twist(), s, 0.1, Some((&g, &shifted))).unwrap();
    assert_eq!(a.value, b.value);
}

#[test]
fn multiplicative_assembly_matches_direct_summation() {
    let delta = delta_coeffs::<f64>(1500);
    let psi = ModCharacter::legendre(5).unwrap();
    for s in [c(14.0, 0.0), c(14.0, 2.0)] {
        let assembled =
            lambda_multiplicative(&delta, &delta, &PhaseSource::Level1, 12, &psi, s, None).unwrap();
        let direct = lambda_multiplicative_direct(&delta, &psi, s).unwrap();
        let rel = (assembled.value - direct.value).norm() / direct.value.norm();
        assert!(rel < 1e-8, "s = {s}: {} vs {}", assembled.value, direct.value);
    }
    let trivial = ModCharacter::principal(1);
    let s = c(8.0, 1.0);
    let a = lambda_multiplicative(&delta, &delta, &PhaseSource::Level1, 12, &trivial, s, None)
        .unwrap();
    let b = lambda_additive(&delta, AdditiveTwist::untwisted(), s, 1.0, Some((&delta, &level_one(12))))
        .unwrap();
    assert!((a.value - b.value).norm() < 1e-12 * b.value.norm());
}

#[test]
fn imprimitive_characters_are_rejected() {
    let delta = delta_coeffs::<f64>(50);
    let principal = ModCharacter::principal(4);
    let r = lambda_multiplicative(&delta, &delta, &PhaseSource::Level1, 12, &principal, c(8.0, 0.0), None);
    assert!(r.is_err());
}

#[test]
fn gauss_assembly_identity_on_random_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for q in 1..=8u64 {
        for psi in ModCharacter::primitive(q) {
            for p in [5u64, 11, 13] {
                if q > 1 && p % q == 0 {
                    continue;
                }
                let x: Vec<C64> = (0..q)
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let (lhs, rhs) = gauss_assembly_identity(&psi, p, &x).unwrap();
                assert!((lhs - rhs).norm() < 1e-10, "q = {q}, p = {p}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn multiplicative_fe_for_delta_delta_eleven() {
    let (f, g) = delta_delta_p::<f64>(11, 400);
    let chi = DirichletChar::trivial(11).unwrap();
    let psi = ModCharacter::legendre(3).unwrap();
    let source = PhaseSource::Character(&chi);
    let report = check_fe_multiplicative(&f, &g, &source, 24, &psi, &[c(12.0, 0.0), c(13.0, 1.0)], &FeOptions::default())
        .unwrap();
    assert!(report.pass, "{report:#?}");
    // psi(11) = -1 mod 3; the opposite sign must not fit
    for sample in &report.samples {
        let lhs = c(sample.lhs.0, sample.lhs.1);
        let rhs = c(sample.rhs.0, sample.rhs.1);
        assert!((lhs + rhs).norm() > 0.5 * lhs.norm());
    }
    let trivial = ModCharacter::principal(1);
    let r = check_fe_multiplicative(&f, &g, &source, 24, &trivial, &[c(12.5, 0.0)], &FeOptions::default())
        .unwrap();
    assert!(r.pass, "{r:#?}");
}

#[test]
fn certificate_for_delta_delta_five() {
    let (f, g) = delta_delta_p::<f64>(5, 200);
    let chi = DirichletChar::trivial(5).unwrap();
    let cert = certify_modularity(&f, &g, 5, 24, &chi, 1e-7).unwrap();
    assert!(cert.verdict, "{cert:#?}");
    assert_eq!(cert.per_generator.len(), cert.q_set.len());
    let bad = f.perturbed(7, 1.0);
    let cert = certify_modularity(&bad, &g, 5, 24, &chi, 1e-7).unwrap();
    assert!(!cert.verdict);
    assert!(cert.failing.is_some());
    assert!(cert.clone().into_result().is_err());
}

#[test]
fn delta_is_a_level_five_form() {
    let delta = delta_coeffs::<f64>(400);
    // Delta |_12 W_5 = 5^6 Delta(5z)
    let mut ints = vec![BigInt::from(0); 401];
    let tau = delta.exact.clone().unwrap();
    for m in 1..=80 {
        ints[5 * m] = &tau[m] * BigInt::from(15625);
    }
    let g = CoeffSeries::from_exact("5^6 Delta(5z)", 12, 5, 6.0, ints);
    let chi = DirichletChar::trivial(5).unwrap();
    let cert = certify_modularity(&delta, &g, 5, 12, &chi, 1e-7).unwrap();
    assert!(cert.verdict, "{cert:#?}");
}
