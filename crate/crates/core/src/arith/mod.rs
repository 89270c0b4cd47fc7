//! Exact arithmetic: rationals, sparse polynomials, reduced rational
//! functions and truncated power series.

pub mod gcd;
pub mod laurent;
pub mod parse;
pub mod poly;
pub mod ratfn;
pub mod series;
pub mod var;

use thiserror::Error;

pub use gcd::{gcd, gcd_rational};
pub use laurent::{laurent_at_kappa, KappaLaurent};
pub use poly::{MPoly, Ring, ZPoly};
pub use ratfn::RatFn;
pub use series::{QSeries, SeriesCoeff};
pub use var::{Mono, Var};

/// Arbitrary-precision rational number.
pub type Rat = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at specialization {var} = {value}: denominator factor ({factor})^{multiplicity}")]
    PoleAtSpecialization {
        var: String,
        value: String,
        factor: String,
        multiplicity: u32,
    },
    #[error("series precondition violated: {0}")]
    SeriesPrecondition(String),
    #[error("excess pole at kappa = 0: order {order} exceeds {max}")]
    ExcessPole { order: u32, max: u32 },
    #[error("parse error: {0}")]
    Parse(String),
}
