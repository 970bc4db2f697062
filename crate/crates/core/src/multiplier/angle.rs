//! Exact angles `e(r + s * sqrt 2)` with `r, s` rational.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// The unit-circle value `e(r + s * alpha)` with `alpha = sqrt 2`.
///
/// The rational part is kept reduced into `[0, 1)`, so equality of angles
/// is equality of the represented values.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Angle {
    r: Rational,
    s: Rational,
}

fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

impl Angle {
    pub fn new(r: Rational, s: Rational) -> Self {
        Angle { r: frac(&r), s }
    }

    pub fn zero() -> Self {
        Angle {
            r: Rational::zero(),
            s: Rational::zero(),
        }
    }

    pub fn rational(r: Rational) -> Self {
        Angle::new(r, Rational::zero())
    }

    /// `e(num / den)`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Angle::rational(Rational::new(num.into(), den.into()))
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn s(&self) -> &Rational {
        &self.s
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    pub fn has_finite_order(&self) -> bool {
        self.s.is_zero()
    }

    /// Order of a finite-order angle, `None` for infinite order.
    pub fn order(&self) -> Option<BigInt> {
        self.has_finite_order().then(|| self.r.denom().clone())
    }

    pub fn scale(&self, k: i64) -> Angle {
        let k = Rational::from_integer(k.into());
        Angle::new(&self.r * &k, &self.s * &k)
    }

    pub fn scale_rational(&self, k: &Rational) -> Angle {
        Angle::new(&self.r * k, &self.s * k)
    }

    /// `r + s sqrt 2` reduced mod 1 in double precision.
    pub fn turns(&self) -> f64 {
        let s = self.s.to_f64().unwrap_or(0.0) * std::f64::consts::SQRT_2;
        let t = self.r.to_f64().unwrap_or(0.0) + s.rem_euclid(1.0);
        t.rem_euclid(1.0)
    }

    pub fn value(&self) -> Complex<f64> {
        Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * self.turns())
    }

    /// Parses `"n/d"` or `"n"`.
    pub fn parse_rational(text: &str) -> Result<Rational> {
        let text = text.trim();
        let bad = || Error::Invalid(format!("cannot parse rational {text:?}"));
        match text.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Rational::new(n, d))
            }
            None => Ok(Rational::from_integer(text.parse().map_err(|_| bad())?)),
        }
    }

    pub fn format_rational(x: &Rational) -> String {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl Default for Angle {
    fn default() -> Self {
        Angle::zero()
    }
}

impl Add for &Angle {
    type Output = Angle;
    fn add(self, o: &Angle) -> Angle {
        Angle::new(&self.r + &o.r, &self.s + &o.s)
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, o: Angle) -> Angle {
        &self + &o
    }
}

impl Sub for &Angle {
    type Output = Angle;
    fn sub(self, o: &Angle) -> Angle {
        Angle::new(&self.r - &o.r, &self.s - &o.s)
    }
}

impl Neg for &Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle::new(-&self.r, -&self.s)
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.s.is_zero() {
            write!(f, "e({})", self.r)
        } else {
            write!(f, "e({} + {}*sqrt2)", self.r, self.s)
        }
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator(xs: &[Rational]) -> BigInt {
    xs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}
