//! Computational companion to near-counterexamples for Weil's converse
//! theorem at prime level.
//!
//! * [`arith`]: exact SL2(Z) algebra.
//! * [`presentation`]: free generators of Gamma0(p)/{±I}, word problem,
//!   abelianization.
//! * [`multiplier`]: multiplier systems as exact angles and the solver for
//!   infinite-order systems imitating a Dirichlet character.
//! * [`series`]: q-expansions (Delta, Delta(z)Delta(pz), Eisenstein series
//!   with multiplier).
//! * [`analytic`]: Gamma functions, Gauss sums, twisted completed
//!   L-series and functional-equation checks.

pub mod analytic;
pub mod arith;
pub mod error;
pub mod io;
pub mod linalg;
pub mod multiplier;
pub mod presentation;
pub mod reproduce;
pub mod scalar;
pub mod series;

use num_complex::Complex;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

pub type Rational = num_rational::BigRational;
pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;
pub type RationalMatrix = linalg::Matrix<Rational>;
pub type CoeffSeries64 = series::CoeffSeries<f64>;
pub type CoeffSeries32 = series::CoeffSeries<f32>;
pub type LambdaValue64 = analytic::LambdaValue<f64>;
