//! Exact SL2(Z) arithmetic: matrices, the half-plane action and `S`/`T` words.

pub mod mat2;
pub mod numth;
pub mod word;

pub use mat2::{mat_mul, slash_action, FrickeMat, HalfPlaneAction, Mat2, ProjMat2};
pub use word::{decompose_sl2, Letter, StDecomposition, StWord, Token};
