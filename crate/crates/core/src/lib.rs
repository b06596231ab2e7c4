//! Numerical and exact tools for multiplicative recurrence of sets of the
//! form `{(an+b)/(cn+d)}`.
//!
//! The crate is organised bottom-up:
//!
//! * [`numkernel`]: factorization, CRT, discrete logarithms, prime sieves.
//! * [`multfunc`]: unit values, Dirichlet characters and completely
//!   multiplicative functions with an exact (rational angle) value path.
//! * [`pretentious`]: pretentious distances, logarithmic averages and
//!   correlations, aperiodicity profiles, prime character sums.
//! * [`folner`]: multiplicative Følner sets and the CRT progression trick.
//! * [`recurrence`]: the recurrence criterion, scans, density estimates,
//!   counterexample certificates and the Fejér approximation.
//! * [`multsys`]: rotation systems on products of circles with exact arcs.
//! * [`expr`] and [`config`]: the function grammar and experiment configs.

pub mod config;
pub mod error;
pub mod expr;
pub mod folner;
pub mod multfunc;
pub mod multsys;
pub mod numkernel;
pub mod pretentious;
pub mod recurrence;
pub mod sum;

pub use error::{Error, Result};
