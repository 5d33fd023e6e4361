use std::collections::BTreeMap;
use std::ops::{Div, Mul};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow};
use parking_lot::RwLock;

use crate::error::SurdError;

/// A positive rational held as a map prime -> signed exponent.
///
/// Products and quotients only touch exponents; the integer is built on request.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FactoredInt {
    exps: BTreeMap<u64, i64>,
}

impl FactoredInt {
    pub fn one() -> Self {
        Self::default()
    }

    /// Factor a positive machine integer by trial division.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn from_u64(mut n: u64) -> Self {
        assert!(n > 0, "FactoredInt cannot represent zero");
        let mut exps = BTreeMap::new();
        let mut p = 2u64;
        while p * p <= n {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 0 {
                exps.insert(p, e);
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if n > 1 {
            *exps.entry(n).or_insert(0) += 1;
        }
        FactoredInt { exps }
    }

    pub fn exponents(&self) -> &BTreeMap<u64, i64> {
        &self.exps
    }

    pub fn exponent(&self, p: u64) -> i64 {
        self.exps.get(&p).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// True when no exponent is negative.
    pub fn is_integer(&self) -> bool {
        self.exps.values().all(|&e| e >= 0)
    }

    fn combine(&mut self, other: &FactoredInt, sign: i64) {
        for (&p, &e) in &other.exps {
            let slot = self.exps.entry(p).or_insert(0);
            *slot += sign * e;
            if *slot == 0 {
                self.exps.remove(&p);
            }
        }
    }

    pub fn mul_assign_ref(&mut self, other: &FactoredInt) {
        self.combine(other, 1);
    }

    pub fn div_assign_ref(&mut self, other: &FactoredInt) {
        self.combine(other, -1);
    }

    pub fn pow(&self, k: i64) -> FactoredInt {
        let exps = if k == 0 {
            BTreeMap::new()
        } else {
            self.exps.iter().map(|(&p, &e)| (p, e * k)).collect()
        };
        FactoredInt { exps }
    }

    fn product(parts: impl Iterator<Item = (u64, i64)>) -> BigUint {
        let mut acc = BigUint::one();
        for (p, e) in parts {
            acc *= Pow::pow(BigUint::from(p), e as u64);
        }
        acc
    }

    /// Numerator and denominator as integers.
    pub fn num_den(&self) -> (BigUint, BigUint) {
        let num = Self::product(self.exps.iter().filter(|(_, &e)| e > 0).map(|(&p, &e)| (p, e)));
        let den = Self::product(self.exps.iter().filter(|(_, &e)| e < 0).map(|(&p, &e)| (p, -e)));
        (num, den)
    }

    pub fn to_rational(&self) -> BigRational {
        let (n, d) = self.num_den();
        BigRational::new_raw(BigInt::from(n), BigInt::from(d))
    }

    /// Split the square root as `coeff * sqrt(kernel)` with a square-free kernel.
    pub fn sqrt_parts(&self) -> (BigRational, BigUint) {
        let mut coeff = FactoredInt::one();
        let mut kernel = BigUint::one();
        for (&p, &e) in &self.exps {
            let odd = e.rem_euclid(2);
            if odd == 1 {
                kernel *= p;
            }
            let half = (e - odd) / 2;
            if half != 0 {
                coeff.exps.insert(p, half);
            }
        }
        (coeff.to_rational(), kernel)
    }
}

impl Mul for &FactoredInt {
    type Output = FactoredInt;
    fn mul(self, rhs: &FactoredInt) -> FactoredInt {
        let mut out = self.clone();
        out.mul_assign_ref(rhs);
        out
    }
}

impl Div for &FactoredInt {
    type Output = FactoredInt;
    fn div(self, rhs: &FactoredInt) -> FactoredInt {
        let mut out = self.clone();
        out.div_assign_ref(rhs);
        out
    }
}

impl Mul for FactoredInt {
    type Output = FactoredInt;
    fn mul(mut self, rhs: FactoredInt) -> FactoredInt {
        self.mul_assign_ref(&rhs);
        self
    }
}

impl Div for FactoredInt {
    type Output = FactoredInt;
    fn div(mut self, rhs: FactoredInt) -> FactoredInt {
        self.div_assign_ref(&rhs);
        self
    }
}

/// Default largest factorial argument; covers every symbol with all 2j <= 200.
pub const DEFAULT_FACTORIAL_LIMIT: u64 = 1024;

static FACTORIAL_LIMIT: AtomicU64 = AtomicU64::new(DEFAULT_FACTORIAL_LIMIT);
static FACTORIALS: RwLock<Vec<FactoredInt>> = RwLock::new(Vec::new());

pub fn factorial_limit() -> u64 {
    FACTORIAL_LIMIT.load(Ordering::Relaxed)
}

/// Change the largest factorial argument accepted by [`factorial_factored`].
pub fn set_factorial_limit(limit: u64) {
    FACTORIAL_LIMIT.store(limit, Ordering::Relaxed);
}

/// n! as a prime-exponent map.
///
/// The table is filled once up to the largest n requested so far; concurrent
/// readers share it and a writer only ever appends.
pub fn factorial_factored(n: u64) -> Result<FactoredInt, SurdError> {
    let limit = factorial_limit();
    if n > limit {
        return Err(SurdError::FactorialLimit { n, limit });
    }
    let idx = n as usize;
    {
        let table = FACTORIALS.read();
        if let Some(f) = table.get(idx) {
            return Ok(f.clone());
        }
    }
    let mut table = FACTORIALS.write();
    if table.is_empty() {
        table.push(FactoredInt::one());
    }
    while table.len() <= idx {
        let k = table.len() as u64;
        let next = &table[table.len() - 1] * &FactoredInt::from_u64(k);
        table.push(next);
    }
    Ok(table[idx].clone())
}
