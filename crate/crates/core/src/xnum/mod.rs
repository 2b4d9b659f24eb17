//! Extended-precision scalars and dense univariate polynomials.
//!
//! Everything the approximation code does happens on [`ExtReal`], an MPFR
//! float at a fixed decimal working precision. [`Poly`] stores coefficients in
//! ascending order and [`poly_roots`] finds all complex roots by simultaneous
//! (Aberth-Ehrlich) iteration.

mod poly;
mod real;
mod roots;

pub use poly::{poly_eval, Poly};
pub use real::{ExtReal, Precision, DEFAULT_DIGITS, MIN_DIGITS};
pub use roots::{poly_roots, Root};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum XnumError {
    #[error("working precision of {digits} digits is below the minimum of {min}")]
    PrecisionTooLow { digits: u32, min: u32 },
    #[error("cannot parse `{0}` as a real number")]
    Parse(String),
    #[error("root finding needs a polynomial of degree >= 1")]
    ConstantPolynomial,
    #[error("root iteration did not converge after {iterations} sweeps (residual {residual:e}); increase the working precision")]
    NoConvergence { iterations: usize, residual: f64 },
}
