use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("level must be a prime greater than 3, got {0}")]
    LevelTooSmall(u64),
    #[error("matrix has determinant {0}, expected 1")]
    Determinant(String),
    #[error("point {0} is not in the upper half-plane")]
    NotUpperHalfPlane(String),
    #[error("matrix {0} is not in Gamma0({1})")]
    NotInGamma0(String, u64),
    #[error("{q} is divisible by the level {p}")]
    DivisibleByLevel { q: i64, p: u64 },
    #[error("unknown generator label {0}")]
    UnknownLabel(String),
    #[error("character is odd")]
    OddCharacter,
    #[error("character is not primitive")]
    NotPrimitive,
    #[error("gamma function pole at {0}")]
    Pole(String),
    #[error("incomplete gamma did not converge for s = {0}, x = {1}")]
    NoConvergence(String, String),
    #[error("multiplier is nontrivial on S, the Kloosterman sum is not well defined")]
    NontrivialOnS,
    #[error("weight {0} is too small for an absolutely convergent Eisenstein series")]
    WeightTooSmall(i64),
    #[error("insufficient coefficients: {0}")]
    InsufficientCoefficients(String),
    #[error("achievable precision {estimate:e} exceeds tolerance {tolerance:e}")]
    PrecisionExceeded { estimate: f64, tolerance: f64 },
    #[error("inconsistent linear system: {0}")]
    Inconsistent(String),
    #[error("presentation rewriting failed: {0}")]
    Rewriting(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("evaluator failed: {0}")]
    Evaluator(String),
}

pub type Result<T> = std::result::Result<T, Error>;
