//! Complex Gamma and upper incomplete Gamma functions.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer<T: Real>(s: Complex<T>) -> bool {
    s.im == T::zero() && s.re <= T::zero() && s.re == s.re.round()
}

/// `log Gamma(s)` for `Re s >= 1/2` (principal branch of the Lanczos form).
fn ln_gamma_right<T: Real>(s: Complex<T>) -> Complex<T> {
    let one = T::one();
    let z = s - one;
    let mut acc = Complex::new(T::c(LANCZOS[0]), T::zero());
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += Complex::new(T::c(c), T::zero()) / (z + T::c(i as f64));
    }
    let t = z + T::c(LANCZOS_G + 0.5);
    let half_ln_2pi = T::c(0.5 * (2.0 * std::f64::consts::PI).ln());
    (z + T::c(0.5)) * t.ln() - t + acc.ln() + half_ln_2pi
}

/// `Gamma(s)`. Poles at the nonpositive integers are reported as errors.
pub fn cgamma<T: Real>(s: Complex<T>) -> Result<Complex<T>> {
    if is_nonpositive_integer(s) {
        return Err(Error::Pole(format!("{s}")));
    }
    if s.re < T::c(0.5) {
        let pi = T::PI();
        let sin = (s * pi).sin();
        let g = ln_gamma_right(Complex::new(T::one(), T::zero()) - s).exp();
        return Ok(Complex::new(pi, T::zero()) / (sin * g));
    }
    Ok(ln_gamma_right(s).exp())
}

/// `log Gamma(s)` for `Re s >= 1/2`; used where `Gamma(s)` would overflow.
pub fn ln_cgamma<T: Real>(s: Complex<T>) -> Result<Complex<T>> {
    if s.re < T::c(0.5) {
        return Ok(cgamma(s)?.ln());
    }
    Ok(ln_gamma_right(s))
}

/// `sum_{n >= 0} x^n / (s (s+1) ... (s+n))`, so that
/// `gamma(s, x) = x^s e^{-x} * series`.
fn lower_series<T: Real>(s: Complex<T>, x: T) -> Result<Complex<T>> {
    let mut term = Complex::new(T::one(), T::zero()) / s;
    let mut sum = term;
    let eps = T::epsilon();
    for n in 1..100_000 {
        term = term * x / (s + T::c(n as f64));
        sum += term;
        if term.norm() <= eps * sum.norm() {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergence(format!("{s}"), format!("{x}")))
}

/// Continued fraction for `x^{-s} e^{x} Gamma(s, x)` (modified Lentz).
fn upper_cf<T: Real>(s: Complex<T>, x: T) -> Result<Complex<T>> {
    let tiny = Complex::new(T::min_positive_value().sqrt(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let mut b = Complex::new(x + T::one(), T::zero()) - s;
    let mut c = one / tiny;
    let mut d = one / b;
    let mut h = d;
    let eps = T::epsilon();
    for i in 1..100_000 {
        let fi = T::c(i as f64);
        let an = -(Complex::new(fi, T::zero()) * (Complex::new(fi, T::zero()) - s));
        b += Complex::new(T::c(2.0), T::zero());
        d = an * d + b;
        if d.norm() < tiny.re {
            d = tiny;
        }
        c = b + an / c;
        if c.norm() < tiny.re {
            c = tiny;
        }
        d = one / d;
        let delta = d * c;
        h *= delta;
        if (delta - one).norm() <= eps {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence(format!("{s}"), format!("{x}")))
}

fn use_continued_fraction<T: Real>(s: Complex<T>, x: T) -> bool {
    x > T::c(1.5) && x > s.re + T::one()
}

/// `E_1(x) = Gamma(0, x)` by its power series, for small `x`.
fn exp_integral_small<T: Real>(x: T) -> T {
    let euler = T::c(0.577_215_664_901_532_9);
    let mut sum = T::zero();
    let mut term = T::one();
    for n in 1..10_000 {
        term = term * (-x) / T::c(n as f64);
        let add = term / T::c(n as f64);
        sum += add;
        if add.abs() <= T::epsilon() * sum.abs().max(T::epsilon()) {
            break;
        }
    }
    -euler - x.ln() - sum
}

/// Scaled upper incomplete gamma `x^{-s} e^{x} Gamma(s, x)` for `x > 0`.
///
/// The scaling keeps the value representable when `x` is large; the
/// unscaled function is [`upper_incomplete_gamma`].
pub fn upper_incomplete_gamma_scaled<T: Real>(s: Complex<T>, x: T) -> Result<Complex<T>> {
    if x <= T::zero() {
        return Err(Error::Invalid(format!("incomplete gamma needs x > 0, got {x}")));
    }
    if use_continued_fraction(s, x) {
        return upper_cf(s, x);
    }
    let one = Complex::new(T::one(), T::zero());
    // recurrence Gamma(s, x) = (Gamma(s + 1, x) - x^s e^{-x}) / s, scaled:
    // G(s) = (x G(s + 1) - 1) / s with G(s) = x^{-s} e^x Gamma(s, x)
    if s.re < T::one() {
        let shift = (T::one() - s.re).ceil().to_usize().unwrap_or(0);
        if is_nonpositive_integer(s) {
            // climb from Gamma(0, x) = E_1(x)
            let n = (-s.re).round().to_usize().unwrap_or(0);
            let mut g = Complex::new(exp_integral_small(x) * x.exp(), T::zero());
            if use_continued_fraction(Complex::new(T::zero(), T::zero()), x) {
                g = upper_cf(Complex::new(T::zero(), T::zero()), x)?;
            }
            for j in 1..=n {
                let sj = -T::c(j as f64);
                g = (g * x - one) / Complex::new(sj, T::zero());
            }
            return Ok(g);
        }
        let mut g = upper_incomplete_gamma_scaled(s + T::c(shift as f64), x)?;
        for j in (0..shift).rev() {
            let sj = s + T::c(j as f64);
            g = (g * x - one) / sj;
        }
        return Ok(g);
    }
    let gamma = cgamma(s)?;
    let lower = lower_series(s, x)?;
    let xs = (s * x.ln()).exp();
    Ok(gamma * x.exp() / xs - lower)
}

/// `Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt` for `x > 0`.
pub fn upper_incomplete_gamma<T: Real>(s: Complex<T>, x: T) -> Result<Complex<T>> {
    let scaled = upper_incomplete_gamma_scaled(s, x)?;
    let factor = (s * x.ln() - x).exp();
    let v = scaled * factor;
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::Invalid(format!(
            "incomplete gamma overflows at s = {s}, x = {x}"
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn calibration_values() {
        assert!((cgamma(c(1.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        let half = cgamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!(matches!(cgamma(c(-3.0, 0.0)), Err(Error::Pole(_))));
        let g5: Complex<f32> = cgamma(Complex::new(5.0f32, 0.0)).unwrap();
        assert!((g5.re - 24.0).abs() < 1e-3);
    }

    #[test]
    fn incomplete_special_cases() {
        for x in [0.1, 1.0, 3.0, 40.0] {
            let v = upper_incomplete_gamma(c(1.0, 0.0), x).unwrap();
            assert!((v.re - (-x).exp()).abs() < 1e-14 * (-x).exp().max(1e-300) + 1e-300);
        }
        let near = upper_incomplete_gamma(c(3.5, 1.0), 1e-8).unwrap();
        let full = cgamma(c(3.5, 1.0)).unwrap();
        assert!((near - full).norm() < 1e-10 * full.norm());
        assert!(upper_incomplete_gamma(c(1.0, 0.0), 0.0).is_err());
    }
}
