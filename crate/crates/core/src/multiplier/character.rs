//! Dirichlet characters modulo a prime, parametrized by their value at the
//! smallest primitive root.

use super::angle::Angle;
use crate::arith::numth::{is_prime, primitive_root};
use crate::error::{Error, Result};

/// `chi(g) = e(t / (p - 1))` for the smallest primitive root `g` mod `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletChar {
    pub modulus: u64,
    pub t: u64,
    pub root: u64,
    log: Vec<u64>,
}

impl DirichletChar {
    pub fn new(p: u64, t: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let order = p - 1;
        let root = primitive_root(p);
        let mut log = vec![0u64; p as usize];
        let mut x = 1u64;
        for k in 0..order {
            log[x as usize] = k;
            x = x * root % p;
        }
        Ok(DirichletChar {
            modulus: p,
            t: t.rem_euclid(order as i64) as u64,
            root,
            log,
        })
    }

    pub fn trivial(p: u64) -> Result<Self> {
        DirichletChar::new(p, 0)
    }

    /// The Legendre symbol mod `p`.
    pub fn quadratic(p: u64) -> Result<Self> {
        DirichletChar::new(p, ((p - 1) / 2) as i64)
    }

    /// Parses `"trivial"`, `"quadratic"` or an integer `t`.
    pub fn parse(p: u64, text: &str) -> Result<Self> {
        match text.trim() {
            "trivial" => DirichletChar::trivial(p),
            "quadratic" => DirichletChar::quadratic(p),
            other => {
                let t: i64 = other
                    .parse()
                    .map_err(|_| Error::Invalid(format!("character {other:?}")))?;
                DirichletChar::new(p, t)
            }
        }
    }

    pub fn is_even(&self) -> bool {
        self.t % 2 == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.t == 0
    }

    pub fn order(&self) -> u64 {
        let n = self.modulus - 1;
        n / num_integer::gcd(n, self.t)
    }

    /// Angle of `chi(x)`; `None` when `p | x`.
    pub fn angle(&self, x: i64) -> Option<Angle> {
        let p = self.modulus as i64;
        let r = x.rem_euclid(p);
        if r == 0 {
            return None;
        }
        let k = self.log[r as usize];
        Some(Angle::from_ratio(
            ((self.t as u128 * k as u128) % (self.modulus as u128 - 1)) as i64,
            p - 1,
        ))
    }

    pub fn value(&self, x: i64) -> num_complex::Complex<f64> {
        self.angle(x)
            .map_or(num_complex::Complex::new(0.0, 0.0), |a| a.value())
    }

    pub fn label(&self) -> String {
        if self.is_trivial() {
            "trivial".into()
        } else {
            format!("t={}", self.t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_mod_five() {
        let chi = DirichletChar::quadratic(5).unwrap();
        assert!(chi.is_even());
        assert_eq!(chi.angle(2).unwrap(), Angle::from_ratio(1, 2));
        assert_eq!(chi.angle(4).unwrap(), Angle::zero());
        assert!(chi.angle(10).is_none());
    }

    #[test]
    fn multiplicative() {
        let chi = DirichletChar::new(13, 5).unwrap();
        for x in 1..13 {
            for y in 1..13 {
                let lhs = chi.angle(x * y).unwrap();
                let rhs = &chi.angle(x).unwrap() + &chi.angle(y).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        assert!(!chi.is_even());
        assert_eq!(chi.angle(-1).unwrap(), Angle::from_ratio(1, 2));
    }
}
