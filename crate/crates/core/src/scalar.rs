//! Scalar abstractions shared by the exact and floating-point code paths.
//!
//! [`Scalar`] is the minimal ring interface needed to act with integer
//! matrices on complex points; it is implemented for `f32`, `f64` and
//! [`BigRational`], so cocycle identities can be checked exactly. [`Real`]
//! adds everything the analytic code needs on top of a binary float.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, NumAssign, ToPrimitive};

pub trait Scalar: Clone + Num + Neg<Output = Self> + PartialOrd + Debug {
    fn from_bigint(n: &BigInt) -> Self;
}

impl Scalar for f64 {
    fn from_bigint(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    fn from_bigint(n: &BigInt) -> Self {
        n.to_f32().unwrap_or(f32::NAN)
    }
}

impl Scalar for BigRational {
    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
}

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Scalar
    + Copy
    + Debug
    + Display
    + Send
    + Sync
    + Sum
    + Default
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {}
impl Real for f32 {}
