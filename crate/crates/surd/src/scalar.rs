use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::surd::{SurdSum, SurdTerm};

/// Value type for the recoupling evaluators.
///
/// Symbols are computed exactly as a single [`SurdTerm`] and then lifted into
/// the scalar, so `SurdSum` gives exact results and `f64`/`f32` give rounded ones.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_term(t: &SurdTerm) -> Self;

    fn from_i64(n: i64) -> Self;

    /// sqrt(n) for a nonnegative integer.
    fn sqrt_u64(n: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// Multiply by +1 or -1.
    fn signed(self, sign: i32) -> Self {
        if sign < 0 {
            -self
        } else {
            self
        }
    }
}

impl Scalar for SurdSum {
    fn from_term(t: &SurdTerm) -> Self {
        t.to_surd()
    }

    fn from_i64(n: i64) -> Self {
        SurdSum::from_integer(n)
    }

    fn sqrt_u64(n: u64) -> Self {
        SurdSum::sqrt_of(n)
    }

    fn to_f64(&self) -> f64 {
        SurdSum::to_f64(self)
    }
}

fn term_f64(coeff: &BigRational, kernel: &BigUint) -> f64 {
    if coeff.is_zero() {
        return 0.0;
    }
    let c = coeff.to_f64().unwrap_or(f64::NAN);
    c * kernel.to_f64().unwrap_or(f64::NAN).sqrt()
}

impl Scalar for f64 {
    fn from_term(t: &SurdTerm) -> Self {
        term_f64(&t.coeff, &t.kernel)
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn sqrt_u64(n: u64) -> Self {
        (n as f64).sqrt()
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_term(t: &SurdTerm) -> Self {
        term_f64(&t.coeff, &t.kernel) as f32
    }

    fn from_i64(n: i64) -> Self {
        n as f32
    }

    fn sqrt_u64(n: u64) -> Self {
        (n as f64).sqrt() as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

/// Exact value type.
pub type Exact = SurdSum;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_term() {
        let t = SurdTerm { coeff: BigRational::new((-1).into(), 3.into()), kernel: 6u32.into() };
        let e = <SurdSum as Scalar>::from_term(&t);
        let f = <f64 as Scalar>::from_term(&t);
        let g = <f32 as Scalar>::from_term(&t);
        assert!((e.to_f64() - f).abs() < 1e-15);
        assert!((g as f64 - f).abs() < 1e-6);
        assert_eq!(<f64 as Scalar>::sqrt_u64(9), 3.0);
        assert_eq!(<SurdSum as Scalar>::from_i64(-2).signed(-1), SurdSum::from_integer(2));
    }
}
