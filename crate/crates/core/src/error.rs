use thiserror::Error;

/// Errors surfaced by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quotient factor {index} is an exact zero")]
    QuotientByZero { index: usize },

    #[error("integrand returned a non-finite value at node {node} (z = {re} + {im}i)")]
    NonFiniteIntegrand { node: usize, re: f64, im: f64 },

    #[error("inner product method unsupported: {0}")]
    UnsupportedMethod(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no sign change for level {level} at q = {q}")]
    NoSignChange { level: usize, q: u32 },

    #[error("row {row} of the coupling matrix is not diagonally dominant (off-diagonal sum {sum})")]
    NotDominant { row: usize, sum: f64 },

    #[error("Gram entry ({i}, {j}): {cause}")]
    GramEntry { i: usize, j: usize, cause: Box<Error> },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
