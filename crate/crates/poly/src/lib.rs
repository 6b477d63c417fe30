//! Exact sparse Laurent polynomials over ℤ: arithmetic, exact division,
//! multivariate gcd, substitution and the `den` valuation used by exchange
//! polynomials.

mod den;
mod gcd;
mod int;
mod json;
mod parse;
mod poly;
mod var;

pub use den::{den, den_over, divides_over, multiplicity, multiplicity_over};
pub use gcd::{gcd, strip_common_factors};
pub use int::Int;
pub use poly::LaurentPoly;
pub use var::{Tag, VarId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("quotient is not a Laurent polynomial")]
    NotDivisible,
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("den undefined: {0}")]
    DenUndefined(String),
}
