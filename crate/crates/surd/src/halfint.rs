use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use crate::error::ParseError;

/// A half-integer stored as twice its value.
///
/// `HalfInt::from_twice(3)` is 3/2. Arithmetic keeps the representation exact,
/// so parity (integer vs half-odd) is never lost.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    #[inline]
    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    #[inline]
    pub const fn from_int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    /// Twice the value.
    #[inline]
    pub const fn twice(self) -> i32 {
        self.0
    }

    #[inline]
    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    #[inline]
    pub const fn is_half_odd(self) -> bool {
        self.0 % 2 != 0
    }

    #[inline]
    pub const fn is_negative(self) -> bool {
        self.0 < 0
    }

    #[inline]
    pub const fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// The integer value, if this is an integer.
    pub const fn to_int(self) -> Option<i32> {
        if self.0 % 2 == 0 {
            Some(self.0 / 2)
        } else {
            None
        }
    }

    /// Dimension 2j+1 of the spin-j representation.
    #[inline]
    pub const fn dim(self) -> i64 {
        self.0 as i64 + 1
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Projections m = -j, -j+1, ..., j.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> + Clone {
        let j = self.0;
        let count = if j >= 0 { j + 1 } else { 0 };
        (0..count).map(move |k| HalfInt(-j + 2 * k))
    }

    /// Spins k with |j - s| <= k <= j + s and j + s + k integer.
    pub fn coupled_range(self, s: HalfInt) -> impl Iterator<Item = HalfInt> + Clone {
        let lo = (self.0 - s.0).abs();
        let hi = self.0 + s.0;
        (lo..=hi).step_by(2).map(HalfInt)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    #[inline]
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    #[inline]
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    #[inline]
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = ParseError;

    /// Accepts `3/2`, `-1/2`, `2`, `4/2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ParseError::HalfInt(s.to_string());
        match s.split_once('/') {
            None => {
                let n: i32 = s.parse().map_err(|_| bad())?;
                n.checked_mul(2).map(HalfInt).ok_or_else(bad)
            }
            Some((num, den)) => {
                let num: i32 = num.trim().parse().map_err(|_| bad())?;
                match den.trim() {
                    "1" => num.checked_mul(2).map(HalfInt).ok_or_else(bad),
                    "2" => Ok(HalfInt(num)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

/// (-1)^e for an exponent given as twice its value; the exponent must be an integer.
///
/// Returns +1 or -1. Panics if `twice_exp` is odd, since that would be a complex phase.
#[inline]
pub fn phase_twice(twice_exp: i64) -> i32 {
    assert!(twice_exp % 2 == 0, "phase exponent {twice_exp}/2 is not an integer");
    if (twice_exp / 2).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// (-1)^n for an integer n.
#[inline]
pub fn phase(n: i64) -> i32 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        assert_eq!("3/2".parse::<HalfInt>().unwrap(), HalfInt::from_twice(3));
        assert_eq!("2".parse::<HalfInt>().unwrap(), HalfInt::from_twice(4));
        assert_eq!("-1/2".parse::<HalfInt>().unwrap(), HalfInt::from_twice(-1));
        assert_eq!("4/2".parse::<HalfInt>().unwrap(), HalfInt::from_twice(4));
        assert!("1/3".parse::<HalfInt>().is_err());
        assert!("x".parse::<HalfInt>().is_err());
        assert_eq!(HalfInt::from_twice(3).to_string(), "3/2");
        assert_eq!(HalfInt::from_twice(-4).to_string(), "-2");
    }

    #[test]
    fn projections_and_windows() {
        let m: Vec<i32> = HalfInt::from_twice(3).projections().map(|m| m.twice()).collect();
        assert_eq!(m, vec![-3, -1, 1, 3]);
        assert_eq!(HalfInt::ZERO.projections().count(), 1);
        let k: Vec<i32> = HalfInt::ONE
            .coupled_range(HalfInt::HALF)
            .map(|k| k.twice())
            .collect();
        assert_eq!(k, vec![1, 3]);
    }

    #[test]
    fn phases() {
        assert_eq!(phase_twice(2), -1);
        assert_eq!(phase_twice(-2), -1);
        assert_eq!(phase_twice(4), 1);
        assert_eq!(phase(-3), -1);
    }

    #[test]
    #[should_panic]
    fn odd_phase_panics() {
        phase_twice(1);
    }
}
