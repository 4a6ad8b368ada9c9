//! Exact Wigner-Racah algebra for SU(2) ⊃ U(1).
//!
//! Symbols are evaluated with Racah's single-sum formulas. Factorials are
//! kept as prime-exponent vectors, so every 3-jm and 6-j value comes out as
//! an integer times the square root of a factored rational and is never
//! rounded.

mod half_int;
mod identities;
pub(crate) mod primes;
mod surd;
mod symbols;

pub use half_int::{HalfInt, ParseHalfIntError};
pub use identities::{
    identity_barycenter, identity_contraction, identity_orthogonality_kq, identity_orthogonality_mm,
    run_identity_suite, Exactness, IdentityCheck, IdentitySuiteReport, IdentityTally, SuiteOptions,
};
pub use surd::{ExactSum, SignedSqrtRational};
pub use symbols::{six_j, three_jm, triangle, Delta, WignerError};

pub(crate) use symbols::{six_j_surd, three_jm_surd};
