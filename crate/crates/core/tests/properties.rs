use num_bigint::BigInt;
use num_complex::Complex;
use proptest::prelude::*;
use weilgap::analytic::{upper_incomplete_gamma, FEStatement};
use weilgap::arith::numth::ext_gcd;
use weilgap::arith::{decompose_sl2, HalfPlaneAction, Mat2};
use weilgap::io::{read_coeffs, write_coeffs};
use weilgap::multiplier::{char_multiplier, Angle, DirichletChar};
use weilgap::presentation::build_presentation;
use weilgap::series::CoeffSeries;
use weilgap::Rational;

/// A determinant-one matrix with bottom row `(c, d)` (made coprime) and a
/// shift of the top row by `t` times the bottom row.
fn sl2_from(c: i64, d: i64, t: i64) -> Option<Mat2> {
    let (g, x, y) = ext_gcd(d, c);
    if g.abs() != 1 {
        return None;
    }
    // a d - b c = 1 with a = x g, b = -y g
    let (a, b) = (x * g, -y * g);
    Some(Mat2::sl2(a + t * c, b + t * d, c, d))
}

fn gamma0_from(p: u64, c: i64, d: i64, t: i64) -> Option<Mat2> {
    sl2_from(c * p as i64, d, t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn st_decomposition_round_trip(c in -5000i64..5000, d in -5000i64..5000, t in -50i64..50) {
        if let Some(g) = sl2_from(c, d, t) {
            prop_assert_eq!(decompose_sl2(&g).evaluate(), g);
        }
    }

    #[test]
    fn gamma0_word_round_trip(pi in 0usize..4, c in -3000i64..3000, d in -3000i64..3000, t in -30i64..30) {
        let p = [5u64, 7, 13, 29][pi];
        if let Some(g) = gamma0_from(p, c, d, t) {
            let gens = build_presentation(p).unwrap();
            let w = gens.decompose_gamma0(&g).unwrap();
            prop_assert_eq!(gens.evaluate_gamma_word(&w), g);
        }
    }

    #[test]
    fn mobius_action_composes(
        c1 in -40i64..40, d1 in -40i64..40, c2 in -40i64..40, d2 in -40i64..40,
        x in -2.0f64..2.0, y in 0.1f64..3.0,
    ) {
        if let (Some(g), Some(h)) = (sl2_from(c1, d1, 1), sl2_from(c2, d2, -1)) {
            let z = Complex::new(x, y);
            let gh = &g * &h;
            let direct = gh.act(z).unwrap();
            let nested = g.act(h.act(z).unwrap()).unwrap();
            prop_assert!((direct - nested).norm() <= 1e-9 * (1.0 + direct.norm()));
            prop_assert!(direct.im > 0.0);
        }
    }

    #[test]
    fn automorphy_factor_is_a_cocycle(
        c1 in -40i64..40, d1 in -40i64..40, c2 in -40i64..40, d2 in -40i64..40,
        x in -2.0f64..2.0, y in 0.1f64..3.0,
    ) {
        if let (Some(g), Some(h)) = (sl2_from(c1, d1, 0), sl2_from(c2, d2, 2)) {
            let z = Complex::new(x, y);
            let lhs: Complex<f64> = (&g * &h).automorphy(z);
            let rhs = g.automorphy(h.act(z).unwrap()) * h.automorphy(z);
            prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn abelianization_is_a_homomorphism(
        pi in 0usize..3, c1 in -200i64..200, d1 in -200i64..200, c2 in -200i64..200, d2 in -200i64..200,
    ) {
        let p = [7u64, 13, 29][pi];
        if let (Some(g), Some(h)) = (gamma0_from(p, c1, d1, 0), gamma0_from(p, c2, d2, 1)) {
            let gens = build_presentation(p).unwrap();
            let lhs = gens.abelianize_matrix(&(&g * &h)).unwrap();
            let rhs = gens.abelianize_matrix(&g).unwrap().add(&gens.abelianize_matrix(&h).unwrap());
            prop_assert_eq!(gens.exponents(&lhs), gens.exponents(&rhs));
            let chi = DirichletChar::new(p, 2).unwrap();
            let ms = char_multiplier(&chi, &gens).unwrap();
            let v = ms.evaluate(&gens, &(&g * &h)).unwrap();
            let w = &ms.evaluate(&gens, &g).unwrap() + &ms.evaluate(&gens, &h).unwrap();
            prop_assert_eq!(v, w);
        }
    }

    #[test]
    fn angles_form_a_group(r1 in -50i64..50, r2 in -50i64..50, s1 in -9i64..9, s2 in -9i64..9, d in 1i64..30) {
        let a = Angle::new(Rational::new(r1.into(), d.into()), Rational::from_integer(s1.into()));
        let b = Angle::new(Rational::new(r2.into(), 7.into()), Rational::from_integer(s2.into()));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a + &(-&a), Angle::zero());
        let t = a.turns();
        prop_assert!((0.0..1.0).contains(&t));
    }

    #[test]
    fn dual_twist_depends_on_b_mod_q(a in 1i64..40, q in 2u64..12, shift in -5i64..5) {
        let p = 13u64;
        prop_assume!(q % p != 0 && num_integer::gcd(a, q as i64) == 1);
        let ap = (a * p as i64).rem_euclid(q as i64);
        let b = weilgap::arith::numth::mod_inv(ap, q as i64).unwrap();
        let d = (1 - a * p as i64 * b) / q as i64;
        let fe = FEStatement::new(p, 24, a, q, b, d, Angle::zero()).unwrap();
        let b2 = b + shift * q as i64;
        let d2 = (1 - a * p as i64 * b2) / q as i64;
        let fe2 = FEStatement::new(p, 24, a, q, b2, d2, Angle::zero()).unwrap();
        prop_assert_eq!(fe.dual_twist(), fe2.dual_twist());
        prop_assert_eq!(fe.matrix().det(), BigInt::from(1));
    }

    #[test]
    fn incomplete_gamma_recurrence(re in -25.0f64..25.0, im in -25.0f64..25.0, lx in -4.0f64..2.2) {
        let s = Complex::new(re, im);
        let x = 10f64.powf(lx);
        let lhs = upper_incomplete_gamma(s + 1.0, x).unwrap();
        let rhs = s * upper_incomplete_gamma(s, x).unwrap() + (s * x.ln() - x).exp();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(rhs.norm()));
    }

    #[test]
    fn coefficient_files_round_trip(values in proptest::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 1..40)) {
        let coeffs: Vec<_> = values.iter().map(|&(a, b)| Complex::new(a, b)).collect();
        let errors = vec![1e-12; coeffs.len()];
        let f = CoeffSeries::from_complex("random", 4, 7, 3.0, coeffs, errors);
        let mut buf = Vec::new();
        write_coeffs(&f, &mut buf).unwrap();
        let back = read_coeffs(&buf[..]).unwrap();
        prop_assert_eq!(back.coeffs, f.coeffs);
        prop_assert_eq!(back.level, 7);
    }
}
