//! Exact arithmetic for angular-momentum algebra.
//!
//! * [`HalfInt`]: half-integers stored as twice their value.
//! * [`FactoredInt`] and [`factorial_factored`]: factorials as prime-exponent maps.
//! * [`SurdSum`]: exact sums `c1*sqrt(k1) + c2*sqrt(k2) + ...` with rational
//!   coefficients and square-free kernels, closed under `+`, `-`, `*`.
//! * [`Scalar`]: the value trait the evaluators are generic over.

mod error;
mod factored;
mod halfint;
mod scalar;
mod surd;

pub use error::{ParseError, SurdError};
pub use factored::{
    factorial_factored, factorial_limit, set_factorial_limit, FactoredInt,
    DEFAULT_FACTORIAL_LIMIT,
};
pub use halfint::{phase, phase_twice, HalfInt};
pub use scalar::{Exact, Scalar};
pub use surd::{
    square_free_split, surd_add, surd_eq, surd_from, surd_mul, surd_to_float, SurdSum, SurdTerm,
};

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;
