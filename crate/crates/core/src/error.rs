use thiserror::Error;

use crate::tmat::TMatrix;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid weight {weight}: {reason}")]
    InvalidWeight { weight: i64, reason: &'static str },
    #[error("epsilon is undefined for the zero matrix")]
    ZeroMatrix,
    #[error("index {0} is not positive semidefinite")]
    NotPsd(TMatrix),
    #[error("index {0} has rank below 2")]
    RankTooSmall(TMatrix),
    #[error("({0}) is not in the dual lattice (coordinate sum must be even)")]
    NotInDualLattice(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("q^{n} is beyond the series precision {prec}")]
    OutOfPrecision { n: usize, prec: usize },
    #[error("weight mismatch: {0} vs {1}")]
    WeightMismatch(i64, i64),
    #[error("series is not a modular form of weight {weight}: mismatch at q^{exponent}")]
    NotInSpace { weight: i64, exponent: usize },
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("not p-integral: {0}")]
    NotPIntegral(String),
    #[error("could not factor {0} by trial division")]
    Unfactored(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
