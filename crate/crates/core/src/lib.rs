//! Certified root enclosures and bound checks for the k-generalized
//! Fibonacci polynomials `f_k(X) = X^k − X^{k−1} − … − X − 1`.
//!
//! The numeric core is generic over [`Real`], implemented for the
//! multiprecision [`MpFloat`] and for `f64`/`f32` (fixed at their native
//! precision). Type aliases below fix the common choices.

pub mod analysis;
pub mod ball;
mod consts;
pub mod family;
pub mod interval;
pub mod mpfloat;
pub mod poly;
pub mod real;
pub mod recurrence;
pub mod rootfinder;
pub mod verifier;

pub use ball::ComplexBall;
pub use family::{Error, FamilyIndex, PrecisionConfig};
pub use interval::RealInterval;
pub use mpfloat::MpFloat;
pub use real::{IeeeFloat, Real, Round};
pub use rootfinder::{RootBall, RootKind, RootSet};
pub use verifier::{ClaimId, ClaimResult, Report, Status};

/// Exact integers for discriminants, resultants and recurrence values.
pub type BigIntValue = num_bigint::BigInt;

pub type Ball = ComplexBall<MpFloat>;
pub type Ball64 = ComplexBall<f64>;
pub type Interval = RealInterval<MpFloat>;
pub type Interval64 = RealInterval<f64>;
pub type Roots = RootSet<MpFloat>;
pub type Roots64 = RootSet<f64>;
