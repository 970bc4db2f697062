use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::CoeffSeries;
use crate::arith::numth::divisors;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::Rational;

/// Coefficients of `prod_{n >= 1} (1 - q^n)` up to `q^n_max`.
fn euler_product(n_max: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for j in 1.. {
        let k1 = j * (3 * j - 1) / 2;
        if k1 > n_max {
            break;
        }
        let sign = if j % 2 == 0 { 1 } else { -1 };
        out.push((k1, sign));
        let k2 = j * (3 * j + 1) / 2;
        if k2 <= n_max {
            out.push((k2, sign));
        }
    }
    out.sort_unstable();
    out
}

/// `tau(0..=m_max)` with `tau(0) = 0`.
///
/// Uses `g = h^24` for `h = prod (1 - q^n)` through
/// `n g_n = sum_{j=1}^n (25 j - n) h_j g_{n-j}`, and `tau(m) = g_{m-1}`.
pub fn tau_exact(m_max: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); m_max + 1];
    if m_max == 0 {
        return out;
    }
    let h = euler_product(m_max);
    let mut g: Vec<BigInt> = Vec::with_capacity(m_max);
    g.push(BigInt::one());
    for n in 1..m_max {
        let mut acc = BigInt::zero();
        for &(j, hj) in &h {
            if j > n {
                break;
            }
            let coeff = 25 * j as i64 - n as i64;
            acc += &g[n - j] * (coeff * hj);
        }
        let (q, r) = acc.div_rem(&BigInt::from(n));
        debug_assert!(r.is_zero());
        g.push(q);
    }
    for m in 1..=m_max {
        out[m] = g[m - 1].clone();
    }
    out
}

/// Delta with exact coefficients.
pub fn delta_coeffs<T: Real>(m_max: usize) -> CoeffSeries<T> {
    CoeffSeries::from_exact("Delta", 12, 1, 6.0, tau_exact(m_max))
}

/// `f = g = Delta(z) Delta(pz)`, weight 24 and level `p`.
pub fn delta_delta_p<T: Real>(p: u64, m_max: usize) -> (CoeffSeries<T>, CoeffSeries<T>) {
    let tau = tau_exact(m_max);
    let p = p as usize;
    let mut c = vec![BigInt::zero(); m_max + 1];
    for (m, cm) in c.iter_mut().enumerate() {
        let mut j = 1;
        while p * j < m {
            *cm += &tau[m - p * j] * &tau[j];
            j += 1;
        }
    }
    let f = CoeffSeries::from_exact(&format!("Delta(z)Delta({p}z)"), 24, p as u64, 12.0, c);
    (f.clone(), f)
}

/// Bernoulli numbers `B_0..=B_n` with `B_1 = -1/2`.
pub fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b = vec![Rational::zero(); n + 1];
    b[0] = Rational::one();
    for m in 1..=n {
        let mut acc = Rational::zero();
        let mut binom = BigInt::one();
        for (k, bk) in b.iter().enumerate().take(m) {
            acc += Rational::from_integer(binom.clone()) * bk;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b[m] = -acc / Rational::from_integer(BigInt::from(m + 1));
    }
    b
}

/// The level-one Eisenstein series `E_k = 1 - (2k / B_k) sum sigma_{k-1}(m) q^m`.
pub fn eisenstein_level1<T: Real>(k: i64, m_max: usize) -> Result<CoeffSeries<T>> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::WeightTooSmall(k));
    }
    let bk = bernoulli(k as usize)[k as usize].clone();
    let factor = -Rational::from_integer(BigInt::from(2 * k)) / bk;
    let sig: Vec<BigInt> = (0..=m_max)
        .map(|m| {
            if m == 0 {
                BigInt::zero()
            } else {
                divisors(m as u64)
                    .into_iter()
                    .map(|d| BigInt::from(d).pow(k as u32 - 1))
                    .sum()
            }
        })
        .collect();
    let label = format!("E_{k}");
    if factor.is_integer() {
        let f = factor.to_integer();
        let mut ints: Vec<BigInt> = sig.iter().map(|s| s * &f).collect();
        ints[0] = BigInt::one();
        return Ok(CoeffSeries::from_exact(&label, k, 1, (k - 1) as f64, ints));
    }
    let fnum = num_traits::ToPrimitive::to_f64(&factor).unwrap();
    let coeffs: Vec<num_complex::Complex<T>> = sig
        .iter()
        .enumerate()
        .map(|(m, s)| {
            let v = if m == 0 { 1.0 } else { fnum * super::big_to_f64(s) };
            num_complex::Complex::new(T::c(v), T::zero())
        })
        .collect();
    let errors = coeffs
        .iter()
        .map(|c| 4.0 * f64::EPSILON * c.norm().to_f64_lossy().abs())
        .collect();
    Ok(CoeffSeries::from_complex(&label, k, 1, (k - 1) as f64, coeffs, errors))
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_tau_values() {
        let t = tau_exact(12);
        let expect = [0i64, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612, -370944];
        for (m, &e) in expect.iter().enumerate() {
            assert_eq!(t[m], BigInt::from(e), "tau({m})");
        }
        assert_eq!(&t[6], &(&t[2] * &t[3]));
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli(12);
        assert_eq!(b[1], Rational::new((-1).into(), 2.into()));
        assert_eq!(b[4], Rational::new((-1).into(), 30.into()));
        assert_eq!(b[12], Rational::new((-691).into(), 2730.into()));
    }

    #[test]
    fn e4_coefficients() {
        let e4 = eisenstein_level1::<f64>(4, 3).unwrap();
        let ex = e4.exact.unwrap();
        assert_eq!(ex, vec![1.into(), 240.into(), 2160.into(), 6720.into()]);
    }

    #[test]
    fn delta_delta_leading_terms() {
        let (f, _) = delta_delta_p::<f64>(5, 10);
        let ex = f.exact.unwrap();
        assert!(ex[..=5].iter().all(|x| x.is_zero()));
        assert_eq!(ex[6], BigInt::from(1));
        assert_eq!(ex[7], BigInt::from(-24));
    }
}
