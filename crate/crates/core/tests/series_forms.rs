use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::ToPrimitive;
use weilgap::arith::numth::{divisors, gcd};
use weilgap::arith::{FrickeMat, Mat2};
use weilgap::multiplier::{char_multiplier, DirichletChar, MultiplierSystem};
use weilgap::presentation::build_presentation;
use weilgap::series::{
    coeffs_via_fourier_extraction, delta_coeffs, delta_delta_p, eisenstein_level1,
    eisenstein_multiplier_coeffs, modularity_residual, multiply, twisted_kloosterman,
    CoeffSeries, ExtractionSpec, TEST_POINTS,
};
use weilgap::Error;

fn sigma3(m: u64) -> f64 {
    divisors(m).iter().map(|&d| (d as f64).powi(3)).sum()
}

/// Eisenstein series at infinity for Gamma0(p) in closed form:
/// (p^4 E_4(pz) - E_4(z)) / (p^4 - 1).
fn closed_form_eisenstein(p: u64, m: u64) -> f64 {
    let e4 = |n: u64| if n == 0 { 1.0 } else { 240.0 * sigma3(n) };
    let p4 = (p as f64).powi(4);
    let pe = if m % p == 0 { e4(m / p) } else { 0.0 };
    (p4 * pe - e4(m)) / (p4 - 1.0)
}

fn brute_power_series_tau(n: usize) -> Vec<i64> {
    // q prod (1 - q^k)^24 by repeated multiplication
    let mut poly = vec![0i64; n + 1];
    poly[1] = 1;
    for k in 1..=n {
        for _ in 0..24 {
            for i in (k..=n).rev() {
                poly[i] -= poly[i - k];
            }
        }
    }
    poly
}

#[test]
fn tau_matches_naive_product() {
    let naive = brute_power_series_tau(30);
    let d = delta_coeffs::<f64>(30);
    for m in 1..=30 {
        assert_eq!(d.exact.as_ref().unwrap()[m], BigInt::from(naive[m]), "m = {m}");
    }
}

#[test]
fn delta_delta_p_small_indices() {
    for p in [5u64, 11] {
        let (f, g) = delta_delta_p::<f64>(p, 40);
        let ex = f.exact.as_ref().unwrap();
        let p = p as usize;
        assert!(ex[..=p].iter().all(|x| *x == BigInt::from(0)));
        assert_eq!(ex[p + 1], BigInt::from(1));
        assert_eq!(ex[p + 2], BigInt::from(-24));
        assert_eq!(f.exact, g.exact);
    }
}

#[test]
fn delta_is_level_one_modular() {
    let d = delta_coeffs::<f64>(60);
    let z = Complex::new(0.0, 1.0);
    let (lhs, err) = d.slash(&Mat2::t(), z).unwrap();
    let (rhs, _) = d.evaluate(z).unwrap();
    assert!((lhs - rhs).norm() < 1e-9, "{lhs} vs {rhs}, bound {err}");
}

#[test]
fn delta_delta_p_is_fricke_invariant() {
    let (f, _) = delta_delta_p::<f64>(5, 80);
    let z = Complex::new(0.0, 1.0 / 5f64.sqrt());
    let (lhs, _) = f.slash(&FrickeMat::new(5), z).unwrap();
    let (rhs, _) = f.evaluate(z).unwrap();
    assert!((lhs - rhs).norm() < 1e-8 * rhs.norm().max(1e-30) + 1e-30);
    let z = Complex::new(0.13, 0.5);
    let (lhs, _) = f.slash(&FrickeMat::new(5), z).unwrap();
    let (rhs, _) = f.evaluate(z).unwrap();
    assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm());
}

#[test]
fn eisenstein_times_delta_starts_with_tau() {
    let e4 = eisenstein_level1::<f64>(4, 10).unwrap();
    let prod = multiply(&e4, &delta_coeffs(10));
    let ex = prod.exact.unwrap();
    assert_eq!(ex[1], BigInt::from(1));
    assert_eq!(ex[2], BigInt::from(-24 + 240));
}

#[test]
fn trivial_multiplier_eisenstein_matches_closed_form() {
    let gens = build_presentation(5).unwrap();
    let ms = MultiplierSystem::trivial(&gens);
    let f = eisenstein_multiplier_coeffs(&gens, &ms, 4, 30, 5 * 400).unwrap();
    assert_eq!(f.coeff(0), Complex::new(1.0, 0.0));
    for m in 1..=30 {
        let expect = closed_form_eisenstein(5, m as u64);
        let got = f.coeff(m);
        assert!(
            (got.re - expect).abs() <= f.error(m) && got.im.abs() < 1e-12,
            "m = {m}: {got} vs {expect} (bound {})",
            f.error(m)
        );
    }
}

#[test]
fn eisenstein_residual_shrinks_with_cutoff() {
    let gens = build_presentation(5).unwrap();
    let ms = MultiplierSystem::trivial(&gens);
    let mut previous = f64::INFINITY;
    for factor in [50u64, 100, 200, 400] {
        let f = eisenstein_multiplier_coeffs(&gens, &ms, 4, 900, 5 * factor).unwrap();
        let mut worst: f64 = 0.0;
        for g in &gens.generators {
            for &(x, y) in &TEST_POINTS {
                let (r, _) =
                    modularity_residual(&f, &gens, &ms, &g.matrix, Complex::new(x, y)).unwrap();
                worst = worst.max(r);
            }
        }
        println!("C_max = {}: worst residual {worst:e}", 5 * factor);
        assert!(worst <= previous * 1.05);
        previous = worst;
    }
    assert!(previous < 1e-4);
}

#[test]
fn kloosterman_sums_against_brute_force() {
    let p = 7u64;
    let gens = build_presentation(p).unwrap();
    let chi = DirichletChar::new(p, 2).unwrap();
    let ms = char_multiplier(&chi, &gens).unwrap();
    let trivial = MultiplierSystem::trivial(&gens);
    for c in (1..=3).map(|k| k * p) {
        for m in 0..12u64 {
            let mut twisted = Complex::new(0.0, 0.0);
            let mut plain = Complex::new(0.0, 0.0);
            for d in 0..c as i64 {
                if gcd(d, c as i64) != 1 {
                    continue;
                }
                let e = Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * (m as f64 * d as f64 / c as f64));
                plain += e;
                twisted += chi.value(d).conj() * e;
            }
            let k = twisted_kloosterman(&gens, &ms, m, c).unwrap();
            assert!((k.value - twisted).norm() < 1e-9, "c={c} m={m}");
            let k0 = twisted_kloosterman(&gens, &trivial, m, c).unwrap();
            assert_eq!(k0.exact.unwrap() as f64, plain.re.round());
            assert!(k.value.norm() <= (c as f64) + 1e-9);
        }
    }
}

#[test]
fn kloosterman_requires_trivial_translation() {
    let gens = build_presentation(7).unwrap();
    let mut ms = MultiplierSystem::trivial(&gens);
    ms.angles[0] = weilgap::multiplier::Angle::from_ratio(1, 3);
    assert_eq!(
        twisted_kloosterman(&gens, &ms, 1, 7).unwrap_err(),
        Error::NontrivialOnS
    );
}

#[test]
fn extraction_recovers_tau_at_moderate_height() {
    let d = delta_coeffs::<f64>(120);
    let spec = ExtractionSpec {
        weight: 12,
        level: 1,
        y: 0.15,
        m_max: 10,
        nodes: 128,
        growth: (d.growth_constant, d.sigma),
        tolerance: 1e-6,
    };
    let ex = coeffs_via_fourier_extraction(|z| d.evaluate(z), &Mat2::t(), &spec).unwrap();
    for m in 1..=10 {
        let t = d.exact.as_ref().unwrap()[m].to_f64().unwrap();
        assert!((ex.coeff(m).re - t).abs() < 1e-6, "m={m}: {} vs {t}", ex.coeff(m));
    }
}

#[test]
fn extraction_at_unit_height_reports_lost_precision() {
    let d = delta_coeffs::<f64>(120);
    let spec = ExtractionSpec {
        weight: 12,
        level: 1,
        y: 1.0,
        m_max: 10,
        nodes: 64,
        growth: (d.growth_constant, d.sigma),
        tolerance: 1e-6,
    };
    let err = coeffs_via_fourier_extraction(|z| d.evaluate(z), &Mat2::t(), &spec).unwrap_err();
    assert!(matches!(err, Error::PrecisionExceeded { .. }));
}

#[test]
fn extraction_recovers_fricke_dual() {
    let (f, _) = delta_delta_p::<f64>(5, 200);
    let spec = ExtractionSpec {
        weight: 24,
        level: 5,
        y: 0.2,
        m_max: 12,
        nodes: 128,
        growth: (f.growth_constant, f.sigma),
        tolerance: 1e-4,
    };
    let ex = coeffs_via_fourier_extraction(|z| f.evaluate(z), &FrickeMat::new(5), &spec).unwrap();
    for m in 0..=12 {
        let c = f.exact.as_ref().unwrap()[m].to_f64().unwrap();
        assert!((ex.coeff(m).re - c).abs() <= ex.error(m).max(1e-9), "m={m}");
    }
}

#[test]
fn extraction_is_linear() {
    let d: CoeffSeries<f64> = delta_coeffs(80);
    let e4 = eisenstein_level1::<f64>(4, 80).unwrap();
    let spec = |growth| ExtractionSpec {
        weight: 12,
        level: 1,
        y: 0.2,
        m_max: 6,
        nodes: 64,
        growth,
        tolerance: 1e3,
    };
    let sum = |z| -> weilgap::Result<(Complex<f64>, f64)> {
        let (a, ea) = d.evaluate(z)?;
        let (b, eb) = multiply(&e4, &e4).cast::<f64>().evaluate(z)?;
        let _ = b;
        Ok((a + a, ea + ea + eb * 0.0))
    };
    let one = coeffs_via_fourier_extraction(|z| d.evaluate(z), &Mat2::t(), &spec((d.growth_constant, 6.0))).unwrap();
    let two = coeffs_via_fourier_extraction(sum, &Mat2::t(), &spec((2.0 * d.growth_constant, 6.0))).unwrap();
    for m in 0..=6 {
        assert!((two.coeff(m) - one.coeff(m) * 2.0).norm() < 1e-6 * (1.0 + one.coeff(m).norm()));
    }
}
