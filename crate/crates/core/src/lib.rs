//! Numerical toolkit for characteristic uncertainty relations.
//!
//! For n observables X₁..Xₙ in a state ρ, the uncertainty matrix σ and the
//! mean-commutator matrix C satisfy the family of inequalities
//! C_r(σ) ≥ C_r(C), r = 1..n, between the characteristic coefficients of
//! the two matrices (sums of principal minors of each order). The r = n
//! member is the determinant inequality det σ ≥ det C. This crate evaluates
//! the whole family for su(2), su(1,1) and canonical-quadrature observable
//! sets, constructs the coherent-state families that saturate them, verifies
//! the saturation machinery (subset criterion and the explicit
//! eigenvalue-system for the su(1,1) states), and searches state space for
//! minimum-uncertainty states with a derivative-free optimizer.
//!
//! Randomized verification suites fan out deterministically (seeded
//! per-trial RNG substreams) and run in parallel under the default
//! `parallel` feature; disabling it gives a sequential build with identical
//! results.

pub mod algebra;
pub mod error;
pub mod matcore;
pub mod moments;
pub mod parallel;
pub mod sampling;
pub mod search;
pub mod states;
pub mod truncation;
pub mod uncertainty;
pub mod validate;

pub use error::{Error, Result};
pub use matcore::C64;
