//! Exact 2x2 integer matrices and their action on the upper half-plane.

use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// A 2x2 matrix `[[a, b], [c, d]]` with arbitrary-precision entries.
///
/// Group elements are built with [`Mat2::new`], which insists on
/// determinant one. [`Mat2::new_unchecked`] exists for intermediates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        let m = Self::new_unchecked(a, b, c, d);
        let det = m.det();
        if !det.is_one() {
            return Err(Error::Determinant(det.to_string()));
        }
        Ok(m)
    }

    pub fn new_unchecked(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    /// Panics unless the determinant is one; for literals in code and tests.
    pub fn sl2(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::from_i64(a, b, c, d).expect("determinant one")
    }

    pub fn identity() -> Self {
        Self::sl2(1, 0, 0, 1)
    }

    /// The translation `z -> z + 1`.
    pub fn s() -> Self {
        Self::sl2(1, 1, 0, 1)
    }

    /// The inversion `z -> -1/z`.
    pub fn t() -> Self {
        Self::sl2(0, -1, 1, 0)
    }

    pub fn s_pow(n: impl Into<BigInt>) -> Self {
        Mat2::new_unchecked(BigInt::one(), n.into(), BigInt::zero(), BigInt::one())
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    /// Adjugate; the inverse for determinant-one matrices.
    pub fn inverse(&self) -> Self {
        Mat2::new_unchecked(
            self.d.clone(),
            -&self.b,
            -&self.c,
            self.a.clone(),
        )
    }

    pub fn pow(&self, e: i64) -> Self {
        let mut base = if e < 0 { self.inverse() } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = Mat2::identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_one()
    }

    /// True when the matrix is `I` or `-I`.
    pub fn is_scalar_unit(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d && self.a.abs().is_one()
    }

    /// Equality in PSL2: `self == other` or `self == -other`.
    pub fn proj_eq(&self, other: &Mat2) -> bool {
        self == other || *self == -other
    }

    pub fn in_gamma0(&self, p: u64) -> bool {
        self.c.is_multiple_of(&BigInt::from(p))
    }

    /// Entries as machine integers, if they fit.
    pub fn to_i64s(&self) -> Option<[i64; 4]> {
        Some([
            self.a.to_i64()?,
            self.b.to_i64()?,
            self.c.to_i64()?,
            self.d.to_i64()?,
        ])
    }

    /// The automorphy factor `j(gamma, z) = c z + d`.
    pub fn j<T: Scalar>(&self, z: &Complex<T>) -> Complex<T> {
        let c = T::from_bigint(&self.c);
        let d = T::from_bigint(&self.d);
        Complex::new(c.clone() * z.re.clone() + d, c * z.im.clone())
    }

    /// Moebius action `(a z + b) / (c z + d)` on the upper half-plane.
    pub fn mobius<T: Scalar>(&self, z: &Complex<T>) -> Result<Complex<T>> {
        if z.im <= T::zero() {
            return Err(Error::NotUpperHalfPlane(format!("{z:?}")));
        }
        Ok(self.mobius_unchecked(z))
    }

    fn mobius_unchecked<T: Scalar>(&self, z: &Complex<T>) -> Complex<T> {
        let a = T::from_bigint(&self.a);
        let b = T::from_bigint(&self.b);
        let num = Complex::new(a.clone() * z.re.clone() + b, a * z.im.clone());
        num / self.j(z)
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;

    fn mul(self, y: &Mat2) -> Mat2 {
        Mat2::new_unchecked(
            &self.a * &y.a + &self.b * &y.c,
            &self.a * &y.b + &self.b * &y.d,
            &self.c * &y.a + &self.d * &y.c,
            &self.c * &y.b + &self.d * &y.d,
        )
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, y: Mat2) -> Mat2 {
        &self * &y
    }
}

impl Neg for &Mat2 {
    type Output = Mat2;

    fn neg(self) -> Mat2 {
        Mat2::new_unchecked(-&self.a, -&self.b, -&self.c, -&self.d)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;

    fn neg(self) -> Mat2 {
        -&self
    }
}

pub fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    x * y
}

fn int_to_json(n: &BigInt) -> serde_json::Value {
    match n.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(n.to_string()),
    }
}

pub(crate) fn int_from_json(v: &serde_json::Value) -> Option<BigInt> {
    match v {
        serde_json::Value::Number(n) => n.as_i64().map(BigInt::from),
        serde_json::Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [&self.a, &self.b, &self.c, &self.d]
            .map(int_to_json)
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Mat2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(deserializer)?;
        if raw.len() != 4 {
            return Err(D::Error::custom("matrix must have four entries"));
        }
        let e: Vec<BigInt> = raw
            .iter()
            .map(int_from_json)
            .collect::<Option<_>>()
            .ok_or_else(|| D::Error::custom("matrix entries must be integers"))?;
        Ok(Mat2::new_unchecked(
            e[0].clone(),
            e[1].clone(),
            e[2].clone(),
            e[3].clone(),
        ))
    }
}

/// An element of PSL2(Z): the representative is normalized so that the
/// first nonzero entry among `(c, d, a, b)` is positive.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct ProjMat2 {
    representative: Mat2,
}

impl ProjMat2 {
    pub fn new(m: Mat2) -> Self {
        let lead = [&m.c, &m.d, &m.a, &m.b]
            .into_iter()
            .find(|x| !x.is_zero())
            .map(|x| x.is_negative())
            .unwrap_or(false);
        let representative = if lead { -m } else { m };
        ProjMat2 { representative }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.representative
    }
}

impl From<Mat2> for ProjMat2 {
    fn from(m: Mat2) -> Self {
        ProjMat2::new(m)
    }
}

impl Mul for &ProjMat2 {
    type Output = ProjMat2;

    fn mul(self, y: &ProjMat2) -> ProjMat2 {
        ProjMat2::new(&self.representative * &y.representative)
    }
}

/// The Fricke involution `W_p = [[0, -1/sqrt p], [sqrt p, 0]]`, stored as
/// the integer matrix `[[0, -1], [p, 0]]` with scale `p^{-1/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrickeMat {
    pub level: u64,
}

impl FrickeMat {
    pub fn new(level: u64) -> Self {
        FrickeMat { level }
    }

    pub fn integer_matrix(&self) -> Mat2 {
        Mat2::new_unchecked(
            BigInt::zero(),
            BigInt::from(-1),
            BigInt::from(self.level),
            BigInt::zero(),
        )
    }
}

/// Something acting on the upper half-plane with an automorphy factor.
pub trait HalfPlaneAction<T: Real> {
    fn act(&self, z: Complex<T>) -> Result<Complex<T>>;
    fn automorphy(&self, z: Complex<T>) -> Complex<T>;
}

impl<T: Real> HalfPlaneAction<T> for Mat2 {
    fn act(&self, z: Complex<T>) -> Result<Complex<T>> {
        self.mobius(&z)
    }

    fn automorphy(&self, z: Complex<T>) -> Complex<T> {
        self.j(&z)
    }
}

impl<T: Real> HalfPlaneAction<T> for FrickeMat {
    fn act(&self, z: Complex<T>) -> Result<Complex<T>> {
        if z.im <= T::zero() {
            return Err(Error::NotUpperHalfPlane(format!("{z:?}")));
        }
        let p = T::c(self.level as f64);
        Ok(-(z * p).inv())
    }

    fn automorphy(&self, z: Complex<T>) -> Complex<T> {
        z * T::c(self.level as f64).sqrt()
    }
}

/// `(f|_k gamma)(z) = j(gamma, z)^{-k} f(gamma z)`.
pub fn slash_action<T, F, G>(f: F, k: i64, gamma: &G, z: Complex<T>) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(Complex<T>) -> Result<Complex<T>>,
    G: HalfPlaneAction<T> + ?Sized,
{
    let w = gamma.act(z)?;
    let value = f(w)?;
    Ok(value * gamma.automorphy(z).powi(-(k as i32)))
}
