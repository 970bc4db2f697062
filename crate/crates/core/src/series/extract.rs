use num_complex::Complex;

use super::CoeffSeries;
use crate::arith::HalfPlaneAction;
use crate::error::{Error, Result};
use crate::C64;

/// Parameters for [`coeffs_via_fourier_extraction`].
#[derive(Clone, Debug)]
pub struct ExtractionSpec {
    pub weight: i64,
    pub level: u64,
    /// Height of the horizontal line of integration.
    pub y: f64,
    pub m_max: usize,
    /// Quadrature nodes; raised to at least `4 m_max` and 64.
    pub nodes: usize,
    /// Growth `(C, sigma)` assumed for the extracted coefficients, used for
    /// the aliasing estimate.
    pub growth: (f64, f64),
    /// Largest acceptable error estimate.
    pub tolerance: f64,
}

/// Recovers the coefficients of `g = f|_k W` from values of `f`:
/// `b_m ≈ e^{2 pi m y} (1/N) sum_n g(x_n + iy) e(-m x_n)` with nodes
/// `x_n` equispaced in `[-1/2, 1/2)`.
///
/// `f` returns a value together with an absolute error bound.
pub fn coeffs_via_fourier_extraction<F, W>(
    f: F,
    involution: &W,
    spec: &ExtractionSpec,
) -> Result<CoeffSeries<f64>>
where
    F: Fn(C64) -> Result<(C64, f64)>,
    W: HalfPlaneAction<f64> + ?Sized,
{
    let n = spec.nodes.max(4 * spec.m_max).max(64);
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut samples = Vec::with_capacity(n);
    let mut max_err: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    for k in 0..n {
        let z = Complex::new(k as f64 / n as f64 - 0.5, spec.y);
        let w = involution.act(z)?;
        let (v, err) = f(w)?;
        let j = involution.automorphy(z).powi(-(spec.weight as i32));
        let g = v * j;
        max_err = max_err.max(err * j.norm());
        max_abs = max_abs.max(g.norm());
        samples.push(g);
    }
    let (c, sigma) = spec.growth;
    let mut coeffs = Vec::with_capacity(spec.m_max + 1);
    let mut errors = Vec::with_capacity(spec.m_max + 1);
    for m in 0..=spec.m_max {
        let mut acc = Complex::new(0.0, 0.0);
        for (k, s) in samples.iter().enumerate() {
            let phase = ((m * k) % n) as f64 / n as f64 - 0.5 * m as f64;
            acc += s * Complex::from_polar(1.0, -two_pi * phase);
        }
        let amp = (two_pi * m as f64 * spec.y).exp();
        let aliasing: f64 = (1..=4)
            .flat_map(|j| [m + j * n, (j * n).saturating_sub(m)])
            .filter(|&idx| idx > 0)
            .map(|idx| c * (idx as f64).powf(sigma) * (-two_pi * idx as f64 * spec.y).exp())
            .sum();
        let rounding = 4.0 * f64::EPSILON * max_abs * (n as f64).sqrt();
        coeffs.push(acc / n as f64 * amp);
        errors.push(amp * (max_err + rounding + aliasing));
    }
    let worst = errors.iter().cloned().fold(0.0, f64::max);
    if !(worst <= spec.tolerance) {
        return Err(Error::PrecisionExceeded {
            estimate: worst,
            tolerance: spec.tolerance,
        });
    }
    let label = format!("extracted(y = {})", spec.y);
    Ok(CoeffSeries::from_complex(
        &label,
        spec.weight,
        spec.level,
        sigma,
        coeffs,
        errors,
    ))
}
