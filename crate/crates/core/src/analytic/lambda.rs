//! Completed additively twisted L-series via the incomplete-gamma split.

use num_complex::Complex;
use serde::Serialize;

use super::gamma::{cgamma, upper_incomplete_gamma_scaled};
use crate::error::{Error, Result};
use crate::series::CoeffSeries;
use crate::C64;

/// The twist `e(a m / q)`, with `a` reduced mod `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AdditiveTwist {
    pub a: i64,
    pub q: u64,
}

impl AdditiveTwist {
    pub fn new(a: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Invalid("twist denominator must be positive".into()));
        }
        let a = a.rem_euclid(q as i64);
        if crate::arith::numth::gcd(a, q as i64) != 1 && q != 1 {
            return Err(Error::Invalid(format!("{a}/{q} is not reduced")));
        }
        Ok(AdditiveTwist { a, q })
    }

    pub fn untwisted() -> Self {
        AdditiveTwist { a: 0, q: 1 }
    }

    pub fn phase(&self, m: usize) -> C64 {
        let r = ((self.a as i128 * m as i128).rem_euclid(self.q as i128)) as f64 / self.q as f64;
        Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * r)
    }
}

/// Which twist a [`LambdaValue`] belongs to.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Twist {
    Additive(AdditiveTwist),
    Character { modulus: u64, label: String },
}

/// A value of a completed L-series with an error estimate.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaValue<T> {
    pub value: Complex<T>,
    /// Absolute error estimate: truncation, stored coefficient errors and
    /// accumulated rounding.
    pub error: f64,
    pub s: Complex<T>,
    pub twist: Twist,
    pub y0: f64,
    pub m_max: usize,
}

impl LambdaValue<f64> {
    pub fn relative_error(&self) -> f64 {
        self.error / self.value.norm().max(f64::MIN_POSITIVE)
    }
}

/// Data needed to evaluate `Lambda(f, a/q, s)` by splitting the Mellin
/// integral at `y0`: the dual series `g`, its twist, the level factor
/// `N = p q^2`, the weight and the root number `eps`, so that
/// `Lambda(f, a/q, s) = eps N^{k/2 - s} Lambda(g, dual, k - s)`.
#[derive(Clone, Copy)]
pub struct SplitData<'a> {
    pub f: &'a CoeffSeries<f64>,
    pub twist: AdditiveTwist,
    pub g: &'a CoeffSeries<f64>,
    pub dual_twist: AdditiveTwist,
    pub level_factor: f64,
    pub weight: i64,
    pub root_number: C64,
}

impl<'a> SplitData<'a> {
    /// The same equation read from the other side.
    pub fn reversed(&self) -> SplitData<'a> {
        SplitData {
            f: self.g,
            twist: self.dual_twist,
            g: self.f,
            dual_twist: self.twist,
            level_factor: self.level_factor,
            weight: self.weight,
            root_number: self.root_number.inv(),
        }
    }
}

struct PartialSum {
    value: C64,
    error: f64,
}

/// `sum_m a_m e(am/q) (2 pi m)^{-s} Gamma(s, 2 pi m y0)` with error bound.
fn incomplete_sum(f: &CoeffSeries<f64>, twist: AdditiveTwist, s: C64, y0: f64) -> Result<PartialSum> {
    let two_pi = 2.0 * std::f64::consts::PI;
    // (2 pi m)^{-s} Gamma(s, x) = y0^s e^{-x} G(s, x), G scaled, x = 2 pi m y0
    let y0s = (s * y0.ln()).exp();
    let mut value = Complex::new(0.0, 0.0);
    let mut abs = 0.0;
    let mut coeff_err = 0.0;
    let m_max = f.max_index();
    for m in 1..=m_max {
        let a = f.coeff(m);
        let e = f.error(m);
        if a.norm() == 0.0 && e == 0.0 {
            continue;
        }
        let x = two_pi * m as f64 * y0;
        let decay = (-x).exp();
        if decay == 0.0 {
            break;
        }
        let g = upper_incomplete_gamma_scaled(s, x)? * y0s * decay;
        let term = a * twist.phase(m) * g;
        value += term;
        abs += term.norm();
        coeff_err += e * g.norm();
    }
    let tail = tail_bound(f, s.re, y0)?;
    let rounding = 32.0 * f64::EPSILON * abs;
    Ok(PartialSum {
        value,
        error: tail + coeff_err + rounding,
    })
}

/// `sum_{m > M} C m^sigma (2 pi m)^{-Re s} Gamma(Re s, 2 pi m y0)`.
fn tail_bound(f: &CoeffSeries<f64>, sigma_re: f64, y0: f64) -> Result<f64> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let s = Complex::new(sigma_re, 0.0);
    let y0s = y0.powf(sigma_re);
    let mut total = 0.0;
    let mut m = f.max_index() + 1;
    let mut prev = f64::INFINITY;
    loop {
        let x = two_pi * m as f64 * y0;
        let decay = (-x).exp();
        if decay == 0.0 {
            break;
        }
        let g = upper_incomplete_gamma_scaled(s, x)?.re * y0s * decay;
        let term = f.growth_constant * (m as f64).powf(f.sigma) * g;
        total += term;
        if term < prev && term <= 1e-17 * total {
            break;
        }
        prev = term;
        m += 1;
        if m > f.max_index() + 5_000_000 {
            return Err(Error::InsufficientCoefficients(format!(
                "tail does not decay for y0 = {y0}"
            )));
        }
    }
    if !total.is_finite() {
        return Err(Error::InsufficientCoefficients(format!(
            "infinite tail bound at y0 = {y0}"
        )));
    }
    Ok(total)
}

/// `Lambda(f, a/q, s)` split at `y0`, the part below `y0` rewritten through
/// the modular relation as a sum over the dual coefficients.
///
/// Constant terms `a_0`, `b_0` contribute the polar parts
/// `-a_0 y0^s / s - eps N^{k/2-s} b_0 Y^{k-s} / (k - s)` with `Y = 1/(N y0)`.
pub fn lambda_split(data: &SplitData<'_>, s: C64, y0: f64) -> Result<LambdaValue<f64>> {
    if y0 <= 0.0 || !y0.is_finite() {
        return Err(Error::Invalid(format!("split point must be positive, got {y0}")));
    }
    let k = data.weight as f64;
    let n = data.level_factor;
    let big_y = 1.0 / (n * y0);
    let dual_s = Complex::new(k, 0.0) - s;
    let a0 = data.f.coeff(0);
    let b0 = data.g.coeff(0);
    if (a0.norm() > 0.0 && s.norm() == 0.0) || (b0.norm() > 0.0 && dual_s.norm() == 0.0) {
        return Err(Error::Pole(format!("{s}")));
    }
    let upper = incomplete_sum(data.f, data.twist, s, y0)?;
    let lower = incomplete_sum(data.g, data.dual_twist, dual_s, big_y)?;
    let factor = data.root_number * (Complex::new(k / 2.0, 0.0) - s).expf(n);
    let mut value = upper.value + factor * lower.value;
    let mut error = upper.error + factor.norm() * lower.error;
    if a0.norm() > 0.0 || data.f.error(0) > 0.0 {
        let t = (s * y0.ln()).exp() / s;
        value -= a0 * t;
        error += data.f.error(0) * t.norm();
    }
    if b0.norm() > 0.0 || data.g.error(0) > 0.0 {
        let t = factor * (dual_s * big_y.ln()).exp() / dual_s;
        value -= b0 * t;
        error += data.g.error(0) * t.norm();
    }
    Ok(LambdaValue {
        value,
        error,
        s,
        twist: Twist::Additive(data.twist),
        y0,
        m_max: data.f.max_index().min(data.g.max_index()),
    })
}

/// `(2 pi)^{-s} Gamma(s) sum a_m e(am/q) m^{-s}`, valid for `Re s > sigma + 1`.
pub fn lambda_dirichlet(f: &CoeffSeries<f64>, twist: AdditiveTwist, s: C64) -> Result<LambdaValue<f64>> {
    lambda_dirichlet_weighted(f, |m| twist.phase(m), Twist::Additive(twist), s)
}

/// The Dirichlet-series form with `a_m` replaced by `w(m) a_m`, `|w| <= 1`.
pub fn lambda_dirichlet_weighted(
    f: &CoeffSeries<f64>,
    weight: impl Fn(usize) -> C64,
    twist: Twist,
    s: C64,
) -> Result<LambdaValue<f64>> {
    if s.re <= f.sigma + 1.0 {
        return Err(Error::InsufficientCoefficients(format!(
            "Dirichlet series does not converge absolutely at Re s = {} (sigma = {})",
            s.re, f.sigma
        )));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let pre = cgamma(s)? * (-s).expf(two_pi);
    let mut sum = Complex::new(0.0, 0.0);
    let mut abs = 0.0;
    let mut coeff_err = 0.0;
    for m in 1..=f.max_index() {
        let ms = (-s * (m as f64).ln()).exp();
        let t = f.coeff(m) * weight(m) * ms;
        sum += t;
        abs += t.norm();
        coeff_err += f.error(m) * ms.norm();
    }
    // sum_{m > M} C m^{sigma - Re s} <= C M^{sigma + 1 - Re s} / (Re s - sigma - 1)
    let ex = s.re - f.sigma - 1.0;
    let tail = f.growth_constant * (f.max_index() as f64).powf(-ex) / ex;
    let value = pre * sum;
    Ok(LambdaValue {
        value,
        error: pre.norm() * (tail + coeff_err + 32.0 * f64::EPSILON * abs),
        s,
        twist,
        y0: f64::INFINITY,
        m_max: f.max_index(),
    })
}
