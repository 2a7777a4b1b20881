//! Exact coefficient field: polynomials and rational functions over ℚ.

mod field;
mod gcd;
mod parse;
mod poly;

pub use field::{rational, Scalar};
pub use gcd::{gcd, pseudo_remainder};
pub use parse::parse_scalar;
pub use poly::{Monomial, Poly, Rational, MAX_VARS};
