//! Finite prefixes of q-expansions and the forms used as test vehicles:
//! Delta, level-one Eisenstein series, `Delta(z) Delta(pz)`, and Eisenstein
//! series with a multiplier system.

mod delta;
mod eisenstein;
mod extract;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{ToPrimitive, Zero};

pub use delta::{bernoulli, delta_coeffs, delta_delta_p, eisenstein_level1, tau_exact};
pub use eisenstein::{
    eisenstein_multiplier_coeffs, eisenstein_tail_bound, twisted_kloosterman, KloostermanSum,
    KloostermanWeights,
};
pub use extract::{coeffs_via_fourier_extraction, ExtractionSpec};

use crate::arith::HalfPlaneAction;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Coefficients `a_0, ..., a_M` of `sum a_m e(m z)`.
#[derive(Clone, Debug)]
pub struct CoeffSeries<T> {
    pub label: String,
    pub weight: i64,
    pub level: u64,
    /// Growth exponent: `|a_m| <= C m^sigma`.
    pub sigma: f64,
    /// The constant `C`, measured on the stored prefix.
    pub growth_constant: f64,
    pub coeffs: Vec<Complex<T>>,
    /// Exact integer coefficients, when the source is integral.
    pub exact: Option<Vec<BigInt>>,
    /// Absolute error bound per coefficient.
    pub errors: Vec<f64>,
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

impl<T: Real> CoeffSeries<T> {
    pub fn from_exact(label: &str, weight: i64, level: u64, sigma: f64, ints: Vec<BigInt>) -> Self {
        let coeffs = ints
            .iter()
            .map(|x| Complex::new(T::c(big_to_f64(x)), T::zero()))
            .collect();
        let mut s = CoeffSeries {
            label: label.to_string(),
            weight,
            level,
            sigma,
            growth_constant: 0.0,
            errors: vec![0.0; ints.len()],
            coeffs,
            exact: Some(ints),
        };
        s.recompute_growth();
        s
    }

    pub fn from_complex(
        label: &str,
        weight: i64,
        level: u64,
        sigma: f64,
        coeffs: Vec<Complex<T>>,
        errors: Vec<f64>,
    ) -> Self {
        assert_eq!(coeffs.len(), errors.len());
        let mut s = CoeffSeries {
            label: label.to_string(),
            weight,
            level,
            sigma,
            growth_constant: 0.0,
            coeffs,
            exact: None,
            errors,
        };
        s.recompute_growth();
        s
    }

    /// The series `1`.
    pub fn one(m_max: usize) -> Self {
        let mut ints = vec![BigInt::zero(); m_max + 1];
        ints[0] = BigInt::from(1);
        CoeffSeries::from_exact("1", 0, 1, 0.0, ints)
    }

    /// Largest stored index `M`.
    pub fn max_index(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, m: usize) -> Complex<T> {
        self.coeffs.get(m).copied().unwrap_or_else(Complex::zero)
    }

    pub fn error(&self, m: usize) -> f64 {
        self.errors.get(m).copied().unwrap_or(0.0)
    }

    pub fn is_cusp_form(&self) -> bool {
        self.coeff(0).norm().to_f64_lossy() <= self.error(0)
    }

    /// Recomputes `C = max_{m >= 1} (|a_m| + err_m) / m^sigma`.
    pub fn recompute_growth(&mut self) {
        self.growth_constant = self
            .coeffs
            .iter()
            .zip(&self.errors)
            .enumerate()
            .skip(1)
            .map(|(m, (a, e))| (a.norm().to_f64_lossy() + e) / (m as f64).powf(self.sigma))
            .fold(0.0, f64::max);
    }

    /// Whether the recorded bound holds on the stored prefix.
    pub fn growth_holds(&self) -> bool {
        self.coeffs.iter().enumerate().skip(1).all(|(m, a)| {
            a.norm().to_f64_lossy() <= self.growth_constant * (m as f64).powf(self.sigma) * (1.0 + 1e-12)
        })
    }

    /// Bound for `sum_{m > M} C m^sigma r^m` with `r = e^{-2 pi y}`.
    pub fn tail_bound(&self, y: f64) -> f64 {
        let m0 = self.coeffs.len() as f64;
        let r = (-2.0 * std::f64::consts::PI * y).exp();
        let ratio = ((m0 + 1.0) / m0).powf(self.sigma) * r;
        if ratio >= 1.0 {
            return f64::INFINITY;
        }
        self.growth_constant * m0.powf(self.sigma) * r.powf(m0) / (1.0 - ratio)
    }

    /// `sum_m a_m e(mz)` with an error bound covering truncation, stored
    /// coefficient errors and rounding.
    pub fn evaluate(&self, z: Complex<T>) -> Result<(Complex<T>, f64)> {
        if z.im <= T::zero() {
            return Err(Error::NotUpperHalfPlane(format!("{z:?}")));
        }
        let two_pi = T::c(2.0) * T::PI();
        let y = z.im.to_f64_lossy();
        let mut sum = Complex::zero();
        let mut abs_sum = 0.0;
        let mut coeff_err = 0.0;
        for (m, (a, e)) in self.coeffs.iter().zip(&self.errors).enumerate() {
            if a.is_zero() && *e == 0.0 {
                continue;
            }
            let mt = T::c(m as f64);
            let term = *a * (Complex::new(T::zero(), two_pi * mt) * z).exp();
            let decay = (-2.0 * std::f64::consts::PI * y * m as f64).exp();
            abs_sum += a.norm().to_f64_lossy() * decay;
            coeff_err += e * decay;
            sum += term;
        }
        let eps = T::epsilon().to_f64_lossy();
        let rounding = 8.0 * eps * (self.coeffs.len() as f64).sqrt() * abs_sum;
        Ok((sum, coeff_err + rounding + self.tail_bound(y)))
    }

    /// `(F|_k gamma)(z)` with error bound.
    pub fn slash<G: HalfPlaneAction<T> + ?Sized>(
        &self,
        gamma: &G,
        z: Complex<T>,
    ) -> Result<(Complex<T>, f64)> {
        let w = gamma.act(z)?;
        let (v, err) = self.evaluate(w)?;
        let j = gamma.automorphy(z).powi(-(self.weight as i32));
        Ok((v * j, err * j.norm().to_f64_lossy()))
    }

    /// Copy with `a_m` replaced by `a_m + delta` (for sensitivity tests).
    pub fn perturbed(&self, m: usize, delta: f64) -> Self {
        let mut s = self.clone();
        s.coeffs[m] += Complex::new(T::c(delta), T::zero());
        if let Some(ex) = &mut s.exact {
            if delta.fract() == 0.0 {
                ex[m] += BigInt::from(delta as i64);
            } else {
                s.exact = None;
            }
        }
        s.label = format!("{} (a_{m} perturbed)", self.label);
        s.recompute_growth();
        s
    }

    pub fn truncated(&self, m_max: usize) -> Self {
        let n = (m_max + 1).min(self.coeffs.len());
        let mut s = self.clone();
        s.coeffs.truncate(n);
        s.errors.truncate(n);
        if let Some(ex) = &mut s.exact {
            ex.truncate(n);
        }
        s
    }

    pub fn cast<U: Real>(&self) -> CoeffSeries<U> {
        CoeffSeries {
            label: self.label.clone(),
            weight: self.weight,
            level: self.level,
            sigma: self.sigma,
            growth_constant: self.growth_constant,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Complex::new(U::c(c.re.to_f64_lossy()), U::c(c.im.to_f64_lossy())))
                .collect(),
            exact: self.exact.clone(),
            errors: self.errors.clone(),
        }
    }
}

/// `|(F|_k gamma)(z) - upsilon(gamma) F(z)|` and its error bound.
pub fn modularity_residual(
    f: &CoeffSeries<f64>,
    gens: &crate::presentation::GenSet,
    ms: &crate::multiplier::MultiplierSystem,
    gamma: &crate::arith::Mat2,
    z: Complex<f64>,
) -> Result<(f64, f64)> {
    let phase = ms.evaluate(gens, gamma)?.value();
    let (lhs, e1) = f.slash(gamma, z)?;
    let (rhs, e2) = f.evaluate(z)?;
    Ok(((lhs - phase * rhs).norm(), e1 + e2))
}

/// The three standard test points.
pub const TEST_POINTS: [(f64, f64); 3] = [(0.1, 0.8), (-0.3, 1.1), (0.05, 0.6)];

/// Cauchy product of two prefixes, truncated to the shorter one.
pub fn multiply<T: Real>(f: &CoeffSeries<T>, g: &CoeffSeries<T>) -> CoeffSeries<T> {
    let n = f.coeffs.len().min(g.coeffs.len());
    let label = format!("({}) * ({})", f.label, g.label);
    let weight = f.weight + g.weight;
    let level = num_integer::lcm(f.level, g.level);
    let sigma = f.sigma + g.sigma + 1.0;
    if let (Some(a), Some(b)) = (&f.exact, &g.exact) {
        let ints: Vec<BigInt> = (0..n)
            .map(|m| (0..=m).map(|i| &a[i] * &b[m - i]).sum())
            .collect();
        return CoeffSeries::from_exact(&label, weight, level, sigma, ints);
    }
    let eps = T::epsilon().to_f64_lossy();
    let mut coeffs = Vec::with_capacity(n);
    let mut errors = Vec::with_capacity(n);
    for m in 0..n {
        let mut sum = Complex::zero();
        let mut err = 0.0;
        let mut abs = 0.0;
        for i in 0..=m {
            let (x, y) = (f.coeffs[i], g.coeffs[m - i]);
            sum += x * y;
            let (ax, ay) = (x.norm().to_f64_lossy(), y.norm().to_f64_lossy());
            let (ex, ey) = (f.errors[i], g.errors[m - i]);
            abs += ax * ay;
            err += ax * ey + ex * ay + ex * ey;
        }
        coeffs.push(sum);
        errors.push(err + 4.0 * eps * (m as f64 + 1.0) * abs);
    }
    CoeffSeries::from_complex(&label, weight, level, sigma, coeffs, errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiply_by_one() {
        let d = delta_coeffs::<f64>(20);
        let prod = multiply(&d, &CoeffSeries::one(20));
        assert_eq!(prod.exact, d.exact);
    }

    #[test]
    fn delta_squared_leading_term() {
        let d = delta_coeffs::<f64>(10);
        let sq = multiply(&d, &d);
        let ex = sq.exact.as_ref().unwrap();
        assert!(ex[0].is_zero() && ex[1].is_zero());
        assert_eq!(ex[2], BigInt::from(1));
        assert_eq!(ex[3], BigInt::from(-48));
    }

    #[test]
    fn evaluation_rejects_real_axis() {
        let d = delta_coeffs::<f64>(10);
        assert!(d.evaluate(Complex::new(0.3, 0.0)).is_err());
    }

    #[test]
    fn single_precision_evaluation() {
        let d64 = delta_coeffs::<f64>(40);
        let d32: CoeffSeries<f32> = d64.cast();
        let (v64, _) = d64.evaluate(Complex::new(0.1, 1.0)).unwrap();
        let (v32, e32) = d32.evaluate(Complex::new(0.1f32, 1.0)).unwrap();
        let diff = ((v32.re as f64 - v64.re).powi(2) + (v32.im as f64 - v64.im).powi(2)).sqrt();
        assert!(diff <= e32 + 1e-9, "diff {diff} bound {e32}");
    }
}
