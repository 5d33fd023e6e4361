//! 3nj coefficients of the second kind as cyclic chains of 6j symbols.
//!
//! A bracket with rows `top`, `mid`, `bottom` of length n is
//!
//! ```text
//! sum_x (2x+1) (-1)^(R - n x) prod_i {top_i bottom_i x; bottom_(i+1) top_(i+1) mid_i}
//! ```
//!
//! with indices mod n and R the sum of all 3n entries. For even n the sign of
//! the `n x` term in the phase is immaterial.

use std::fmt;

use surd::{phase_twice, HalfInt, Scalar, SurdTerm};

use crate::error::{Result, SpinError};
use crate::wigner::{dim_term, triangle, wigner_6j_term};

/// A 3nj bracket of the second kind: three rows of n spins.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SecondKindBracket {
    top: Vec<HalfInt>,
    mid: Vec<HalfInt>,
    bottom: Vec<HalfInt>,
}

impl SecondKindBracket {
    /// Rows must have a common length n >= 3 and nonnegative entries.
    pub fn new(top: Vec<HalfInt>, mid: Vec<HalfInt>, bottom: Vec<HalfInt>) -> Result<Self> {
        if top.len() != mid.len() || top.len() != bottom.len() || top.len() < 3 {
            return Err(SpinError::RowLength { top: top.len(), mid: mid.len(), bottom: bottom.len() });
        }
        if let Some(&j) = top.iter().chain(&mid).chain(&bottom).find(|j| j.is_negative()) {
            return Err(SpinError::NegativeSpin(j));
        }
        Ok(SecondKindBracket { top, mid, bottom })
    }

    pub fn n(&self) -> usize {
        self.top.len()
    }

    pub fn top(&self) -> &[HalfInt] {
        &self.top
    }

    pub fn mid(&self) -> &[HalfInt] {
        &self.mid
    }

    pub fn bottom(&self) -> &[HalfInt] {
        &self.bottom
    }

    /// Twice the sum R of all 3n entries.
    pub fn twice_total(&self) -> i64 {
        self.top.iter().chain(&self.mid).chain(&self.bottom).map(|j| j.twice() as i64).sum()
    }

    /// Arguments of the i-th 6j factor at intermediate spin x.
    pub fn factor_args(&self, i: usize, x: HalfInt) -> [HalfInt; 6] {
        let n = self.n();
        let k = (i + 1) % n;
        [self.top[i], self.bottom[i], x, self.bottom[k], self.top[k], self.mid[i]]
    }

    /// Intermediate spins x for which every triad {top_i, bottom_i, x} can hold.
    pub fn x_window(&self) -> Vec<HalfInt> {
        let lo = self.top.iter().zip(&self.bottom).map(|(t, b)| (t.twice() - b.twice()).abs()).max();
        let hi = self.top.iter().zip(&self.bottom).map(|(t, b)| t.twice() + b.twice()).min();
        let (lo, hi) = (lo.unwrap_or(0), hi.unwrap_or(-1));
        (lo..=hi)
            .step_by(2)
            .map(HalfInt::from_twice)
            .filter(|&x| self.top.iter().zip(&self.bottom).all(|(&t, &b)| triangle(t, b, x)))
            .collect()
    }

    /// The single term (2x+1)(-1)^(R-nx) prod_i 6j at a fixed x.
    pub fn x_term(&self, x: HalfInt) -> SurdTerm {
        let mut prod = dim_term(x);
        for i in 0..self.n() {
            let f = wigner_6j_term(self.factor_args(i, x));
            if f.is_zero() {
                return SurdTerm::zero();
            }
            prod = prod.mul(&f);
        }
        let exp = self.twice_total() - self.n() as i64 * x.twice() as i64;
        prod.signed(phase_twice(exp))
    }
}

impl fmt::Display for SecondKindBracket {
    /// `[t1 t2 ... / m1 m2 ... / b1 b2 ...]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |r: &[HalfInt]| r.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "[{} / {} / {}]", row(&self.top), row(&self.mid), row(&self.bottom))
    }
}

/// Full value of the bracket: the sum over every admissible intermediate x.
pub fn second_kind<S: Scalar>(bracket: &SecondKindBracket) -> S {
    let mut acc = S::zero();
    for x in bracket.x_window() {
        let t = bracket.x_term(x);
        if !t.is_zero() {
            acc = acc + S::from_term(&t);
        }
    }
    acc
}

/// The x = s term of the bracket alone.
///
/// Requires {top_i, bottom_i, s} to be a triangle for every column.
pub fn single_x_reduction<S: Scalar>(bracket: &SecondKindBracket, s: HalfInt) -> Result<S> {
    for (&t, &b) in bracket.top.iter().zip(&bracket.bottom) {
        if !triangle(t, b, s) {
            return Err(SpinError::Triad(t, b, s));
        }
    }
    Ok(S::from_term(&bracket.x_term(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use surd::SurdSum;

    fn row(v: &[i32]) -> Vec<HalfInt> {
        v.iter().map(|&t| HalfInt::from_twice(t)).collect()
    }

    #[test]
    fn zero_bracket_is_one() {
        let b = SecondKindBracket::new(row(&[0, 0, 0]), row(&[0, 0, 0]), row(&[0, 0, 0])).unwrap();
        assert_eq!(second_kind::<SurdSum>(&b), SurdSum::from_integer(1));
        assert_eq!(single_x_reduction::<SurdSum>(&b, HalfInt::ZERO).unwrap(), SurdSum::from_integer(1));
    }

    #[test]
    fn single_surviving_x() {
        // top k = 1/2, mid 0, bottom j = 0: only x = 1/2 survives
        let b = SecondKindBracket::new(row(&[1, 1, 1]), row(&[0, 0, 0]), row(&[0, 0, 0])).unwrap();
        assert_eq!(b.x_window(), row(&[1]));
        let full: SurdSum = second_kind(&b);
        let single: SurdSum = single_x_reduction(&b, HalfInt::HALF).unwrap();
        assert_eq!(full, single);
        assert!(!full.is_zero());
    }

    #[test]
    fn closed_triad_never_holds() {
        // {top_0, top_1, mid_0} = {0, 0, 1} is never a triangle
        let b = SecondKindBracket::new(row(&[0, 0, 0]), row(&[2, 0, 0]), row(&[0, 0, 0])).unwrap();
        assert!(second_kind::<SurdSum>(&b).is_zero());
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(SecondKindBracket::new(row(&[0, 0, 0]), row(&[0, 0]), row(&[0, 0, 0])).is_err());
        assert!(SecondKindBracket::new(row(&[0, 0]), row(&[0, 0]), row(&[0, 0])).is_err());
        let b = SecondKindBracket::new(row(&[0, 0, 0]), row(&[0, 0, 0]), row(&[0, 0, 0])).unwrap();
        assert!(single_x_reduction::<SurdSum>(&b, HalfInt::HALF).is_err());
    }
}
