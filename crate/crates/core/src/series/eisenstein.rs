use num_complex::Complex;
use rayon::prelude::*;

use super::CoeffSeries;
use crate::arith::numth::{euler_phi, ext_gcd, gcd, ramanujan_sum};
use crate::arith::Mat2;
use crate::error::{Error, Result};
use crate::multiplier::MultiplierSystem;
use crate::presentation::GenSet;
use crate::C64;

/// `K(m, c) = sum_{d mod c, (d, c) = 1} conj(upsilon(gamma_{c,d})) e(md/c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KloostermanSum {
    pub c: u64,
    pub m: u64,
    pub value: C64,
    /// Set when the multiplier is trivial and the sum is a Ramanujan sum.
    pub exact: Option<i64>,
}

fn e(turns: f64) -> C64 {
    Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * turns)
}

fn is_trivial(ms: &MultiplierSystem) -> bool {
    ms.angles.iter().all(|a| a.is_zero())
}

fn check_translation(ms: &MultiplierSystem, gens: &GenSet) -> Result<()> {
    if !ms.evaluate(gens, &Mat2::s())?.is_zero() {
        return Err(Error::NontrivialOnS);
    }
    Ok(())
}

fn lift(c: i64, d: i64) -> Mat2 {
    let (_, x, y) = ext_gcd(d, c);
    Mat2::from_i64(x, -y, c, d).expect("coprime bottom row lifts")
}

pub fn twisted_kloosterman(
    gens: &GenSet,
    ms: &MultiplierSystem,
    m: u64,
    c: u64,
) -> Result<KloostermanSum> {
    if c == 0 || c % gens.p != 0 {
        return Err(Error::Invalid(format!(
            "modulus {c} is not a positive multiple of {}",
            gens.p
        )));
    }
    check_translation(ms, gens)?;
    if is_trivial(ms) {
        let r = ramanujan_sum(c, m);
        return Ok(KloostermanSum {
            c,
            m,
            value: Complex::new(r as f64, 0.0),
            exact: Some(r),
        });
    }
    let mut value = Complex::new(0.0, 0.0);
    for d in 0..c as i64 {
        if gcd(d, c as i64) != 1 {
            continue;
        }
        let theta = ms.evaluate(gens, &lift(c as i64, d))?.turns();
        let phase = ((m as u128 * d as u128) % c as u128) as f64 / c as f64;
        value += e(phase - theta);
    }
    Ok(KloostermanSum {
        c,
        m,
        value,
        exact: None,
    })
}

/// Memoized `conj(upsilon(gamma_{c,d}))` for `c = p, 2p, ..., <= c_max`.
pub struct KloostermanWeights {
    pub p: u64,
    pub c_max: u64,
    trivial: bool,
    /// Per modulus: `(c, [(d, weight)])`.
    table: Vec<(u64, Vec<(u64, C64)>)>,
}

impl KloostermanWeights {
    pub fn build(gens: &GenSet, ms: &MultiplierSystem, c_max: u64) -> Result<Self> {
        check_translation(ms, gens)?;
        let p = gens.p;
        let trivial = is_trivial(ms);
        let moduli: Vec<u64> = (1..=c_max / p).map(|n| n * p).collect();
        let table = if trivial {
            moduli.into_iter().map(|c| (c, Vec::new())).collect()
        } else {
            moduli
                .par_iter()
                .map(|&c| -> Result<(u64, Vec<(u64, C64)>)> {
                    let mut row = Vec::with_capacity(euler_phi(c) as usize);
                    for d in 0..c as i64 {
                        if gcd(d, c as i64) == 1 {
                            let theta = ms.evaluate(gens, &lift(c as i64, d))?.turns();
                            row.push((d as u64, e(-theta)));
                        }
                    }
                    Ok((c, row))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Ok(KloostermanWeights {
            p,
            c_max,
            trivial,
            table,
        })
    }

    pub fn moduli(&self) -> impl Iterator<Item = u64> + '_ {
        self.table.iter().map(|(c, _)| *c)
    }

    /// `K(m, c)` for every `m` in `0..=m_max` and one modulus.
    fn sums_for(&self, idx: usize, m_max: usize) -> Vec<C64> {
        let (c, row) = &self.table[idx];
        let c = *c;
        if self.trivial {
            return (0..=m_max as u64)
                .map(|m| Complex::new(ramanujan_sum(c, m) as f64, 0.0))
                .collect();
        }
        let roots: Vec<C64> = (0..c).map(|k| e(k as f64 / c as f64)).collect();
        (0..=m_max as u64)
            .map(|m| {
                let mc = m % c;
                row.iter()
                    .map(|&(d, w)| w * roots[((mc * d) % c) as usize])
                    .sum()
            })
            .collect()
    }
}

fn factorial(n: i64) -> f64 {
    (1..=n).map(|x| x as f64).product()
}

/// `(2 pi)^w m^{w-1} / (w-1)! * sum_{c > c_max, p | c} c^{1-w}`, bounded by
/// the integral comparison `p^{1-w} N^{2-w} / (w - 2)` with `N = floor(c_max / p)`.
pub fn eisenstein_tail_bound(p: u64, w: i64, m: u64, c_max: u64) -> f64 {
    let n = (c_max / p).max(1) as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    two_pi.powi(w as i32) * (m as f64).powi(w as i32 - 1) / factorial(w - 1)
        * (p as f64).powi(1 - w as i32)
        * n.powi(2 - w as i32)
        / (w - 2) as f64
}

/// Eisenstein series at infinity with multiplier:
/// `a_0 = 1`, `a_m = ((-2 pi i)^w m^{w-1} / (w-1)!) sum_{p | c <= c_max} c^{-w} K(m, c)`.
pub fn eisenstein_multiplier_coeffs(
    gens: &GenSet,
    ms: &MultiplierSystem,
    w: i64,
    m_max: usize,
    c_max: u64,
) -> Result<CoeffSeries<f64>> {
    if w < 3 {
        return Err(Error::WeightTooSmall(w));
    }
    if w % 2 != 0 {
        return Err(Error::Invalid(format!("weight {w} must be even")));
    }
    let weights = KloostermanWeights::build(gens, ms, c_max)?;
    let per_c: Vec<Vec<C64>> = (0..weights.table.len())
        .into_par_iter()
        .map(|i| {
            let c = weights.table[i].0 as f64;
            let scale = c.powi(-(w as i32));
            weights
                .sums_for(i, m_max)
                .into_iter()
                .map(|k| k * scale)
                .collect()
        })
        .collect();
    let two_pi = 2.0 * std::f64::consts::PI;
    let sign = if (w / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let fact = factorial(w - 1);
    let mut coeffs = vec![Complex::new(1.0, 0.0)];
    let mut errors = vec![0.0];
    for m in 1..=m_max {
        let mut sum = Complex::new(0.0, 0.0);
        let mut abs = 0.0;
        for row in &per_c {
            sum += row[m];
            abs += row[m].norm();
        }
        let pref = sign * two_pi.powi(w as i32) * (m as f64).powi(w as i32 - 1) / fact;
        coeffs.push(sum * pref);
        let rounding = 16.0 * f64::EPSILON * abs * pref.abs() * (per_c.len() as f64).sqrt();
        errors.push(eisenstein_tail_bound(gens.p, w, m as u64, c_max) + rounding);
    }
    let label = format!("E_{w}(Gamma0({}), upsilon; c <= {c_max})", gens.p);
    Ok(CoeffSeries::from_complex(
        &label,
        w,
        gens.p,
        (w - 1) as f64,
        coeffs,
        errors,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::build_presentation;

    #[test]
    fn trivial_kloosterman_at_zero_frequency() {
        let gens = build_presentation(5).unwrap();
        let ms = MultiplierSystem::trivial(&gens);
        for c in [5u64, 10, 15, 30] {
            let k = twisted_kloosterman(&gens, &ms, 0, c).unwrap();
            assert_eq!(k.exact, Some(euler_phi(c) as i64));
        }
        assert!(twisted_kloosterman(&gens, &ms, 1, 7).is_err());
    }

    #[test]
    fn tail_bound_quarter_on_doubling() {
        let a = eisenstein_tail_bound(5, 4, 3, 500);
        let b = eisenstein_tail_bound(5, 4, 3, 1000);
        assert!((b / a - 0.25).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_weight() {
        let gens = build_presentation(5).unwrap();
        let ms = MultiplierSystem::trivial(&gens);
        assert_eq!(
            eisenstein_multiplier_coeffs(&gens, &ms, 2, 5, 50).unwrap_err(),
            Error::WeightTooSmall(2)
        );
    }
}
