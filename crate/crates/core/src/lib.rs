//! Best uniform rational approximation (BURA) of `t^a / (1 + q t^a)` on
//! `[delta, 1]` and its use in solvers for fractional powers of 1D elliptic
//! operators.
//!
//! The crate is organised bottom-up:
//!
//! * [`xnum`] extended-precision reals, polynomials and root finding;
//! * [`remez`] the Remez exchange that computes the best approximation;
//! * [`rational`] product, coefficient and partial-fraction forms, and the
//!   `xi = 1/t` reciprocal transform;
//! * [`ura`] the 0-URA / 1-URA shifted approximants built from a stored BURA;
//! * [`discretize`] finite-difference and finite-element matrices, tridiagonal
//!   eigensolvers and the spectral reference solution;
//! * [`solver`] fractional, reaction and time-stepping solves realised as `k`
//!   shifted tridiagonal systems;
//! * [`dataio`] the `.tab` coefficient format, file naming and the bundled
//!   reference tables.

// `!(x > 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataio;
pub mod discretize;
pub mod rational;
pub mod remez;
pub mod solver;
pub mod ura;
pub mod xnum;

pub use rational::{PartialFractions, ReciprocalFractions};
pub use remez::{compute_bura, BuraResult, RationalApproximant, RemezConfig, TargetParams};
pub use xnum::{ExtReal, Poly, Precision};
