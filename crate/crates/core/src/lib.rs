//! Exact point-count bounds for abelian and Jacobian varieties over finite
//! fields.
//!
//! The crate is organised bottom-up:
//!
//! - [`arith`]: integer square roots, prime powers, partitions, generalized
//!   binomials, the quadratic surds `a + b√d`, and directed-rounding floats.
//! - [`weil`]: Weil polynomials, their validity, point counts, real Weil
//!   polynomials and the harmonic mean η.
//! - [`bounds`]: upper and lower bounds on `#A(F_q)` and on Jacobians.
//! - [`zeta`]: the virtual zeta function `P(t)/((1-t)(1-qt))` and the
//!   sequences `A_n`, `N_n`, `B_n`.
//! - [`genus12`]: extremal elliptic curves and Jacobian surfaces.
//! - [`oracle`]: brute-force computations used to cross-check the closed
//!   forms, and the built-in verification suite.

pub mod arith;
pub mod bounds;
pub mod genus12;
pub mod oracle;
pub mod serial;
pub mod weil;
pub mod zeta;

use thiserror::Error;

pub use arith::{PrimePower, QuadraticValue};
pub use bounds::{BoundEntry, BoundReport, BoundValue};
pub use weil::{RealWeilPolynomial, WeilPolynomial};
pub use zeta::ZetaCoefficients;

/// Arbitrary-precision integer used throughout.
pub type Int = num_bigint::BigInt;
/// Arbitrary-precision rational used throughout.
pub type Rat = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("functional equation a_(2g-n) = q^(g-n) a_n fails at coefficient index {index}")]
    FunctionalEquation { index: usize },
    #[error("P(1) = 0: the polynomial vanishes at t = 1")]
    DegenerateAtOne,
    #[error("coefficients are neither a reciprocal polynomial (a_0 = 1) nor a monic characteristic polynomial")]
    NotNormalized,
    #[error("Serre inequality violated: |tau| = {tau} exceeds g*m = {limit}")]
    SerreViolation { tau: Int, limit: Int },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("h'(q+1) = 0: harmonic mean is undefined")]
    DegenerateHarmonicMean,
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    /// Whether this error signals a broken internal invariant rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
