//! Exact arithmetic: rationals, Laurent polynomials and fractions.

pub mod factor;
pub mod frac;
pub mod mono;
pub mod parse;
pub mod poly;
pub mod rat;

pub use frac::ScalarFraction;
pub use mono::{Mono, Var, MAX_GENUS, NV};
pub use poly::LaurentPoly;
pub use rat::Rat;
