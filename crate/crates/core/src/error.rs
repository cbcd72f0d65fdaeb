use alloc::string::String;
use alloc::vec::Vec;

use crate::ratfun::{BadPrimeReason, Violation};

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("elements live over different primes ({0} and {1})")]
    MismatchedPrime(u64, u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degree {source_degree} does not divide {target_degree}")]
    DegreeMismatch {
        source_degree: usize,
        target_degree: usize,
    },
    #[error("enumerating {size} elements exceeds the budget of {budget}")]
    BudgetExceeded { size: u128, budget: u64 },
    #[error("bad prime {p}: {reason}")]
    BadPrime { p: u64, reason: BadPrimeReason },
    #[error("invalid rational function ({} violation(s))", .0.len())]
    InvalidFunction(Vec<Violation>),
    #[error("evaluation at a pole")]
    PoleEvaluation,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("polygons have different widths")]
    WidthMismatch,
    #[error("empty input")]
    EmptyInput,
    #[error("abscissa {0} is not a vertex")]
    NotAVertex(usize),
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error("internal assertion failed: {0}")]
    Assertion(String),
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::Error::Assertion(alloc::format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
