//! Exact generating functions for moduli of irregular parabolic
//! ε-connections and Higgs bundles on curves, in the universal λ-ring.

pub mod exactalg;
pub mod genfun;
pub mod moduli;
pub mod partition;
pub mod series;
pub mod specialize;
pub mod symfunc;

use thiserror::Error as ThisError;

#[derive(Debug, Clone, PartialEq, Eq, ThisError)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("substitution makes the factor `{0}` vanish")]
    VanishingDenominator(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("truncation mismatch")]
    TruncationMismatch,
    #[error("query outside truncation: {0}")]
    OutOfTruncation(String),
    #[error("series constant term is not {0}")]
    BadConstantTerm(String),
    #[error("polynomiality certificate failed at {0}")]
    Certificate(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("class outside the admissible monoid: {0}")]
    Inadmissible(String),
    #[error("fractional power of a square-root generator: {0}")]
    FractionalPower(String),
    #[error("genericity failure: {0}")]
    Genericity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
