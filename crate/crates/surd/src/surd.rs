use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{ParseError, SurdError};
use crate::factored::FactoredInt;

/// A single term `coeff * sqrt(kernel)` with square-free `kernel`.
///
/// Every Wigner 3j/6j value has this shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurdTerm {
    pub coeff: BigRational,
    pub kernel: BigUint,
}

impl SurdTerm {
    pub fn zero() -> Self {
        SurdTerm { coeff: BigRational::zero(), kernel: BigUint::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// `coeff * sqrt(f)` for a factored radicand.
    pub fn from_factored(coeff: BigRational, radicand: &FactoredInt) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        let (c, kernel) = radicand.sqrt_parts();
        SurdTerm { coeff: coeff * c, kernel }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.coeff) * biguint_to_f64(&self.kernel).sqrt()
    }

    pub fn to_surd(&self) -> SurdSum {
        let mut s = SurdSum::zero();
        s.add_term(self.kernel.clone(), self.coeff.clone());
        s
    }

    pub fn one() -> Self {
        SurdTerm { coeff: BigRational::one(), kernel: BigUint::one() }
    }

    /// A rational value as a term.
    pub fn rational(q: BigRational) -> Self {
        SurdTerm { coeff: q, kernel: BigUint::one() }
    }

    /// sqrt(n) as a term.
    pub fn sqrt_of(n: u64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let (root, kernel) = square_free_split(&BigUint::from(n));
        SurdTerm { coeff: BigRational::from_integer(BigInt::from(root)), kernel }
    }

    /// Product of two terms, renormalized so the kernel stays square-free.
    pub fn mul(&self, other: &SurdTerm) -> SurdTerm {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let (g, kernel) = merge_kernels(&self.kernel, &other.kernel);
        SurdTerm { coeff: &self.coeff * &other.coeff * BigRational::from_integer(BigInt::from(g)), kernel }
    }

    pub fn scale(&self, q: &BigRational) -> SurdTerm {
        if q.is_zero() {
            return Self::zero();
        }
        SurdTerm { coeff: &self.coeff * q, kernel: self.kernel.clone() }
    }

    /// Multiply by +1 or -1.
    pub fn signed(self, sign: i32) -> Self {
        if sign < 0 {
            self.neg()
        } else {
            self
        }
    }
}

impl Neg for SurdTerm {
    type Output = SurdTerm;

    fn neg(mut self) -> SurdTerm {
        self.coeff = -self.coeff;
        self
    }
}

impl fmt::Display for SurdTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_surd())
    }
}

/// An exact finite sum of rational multiples of square roots of square-free integers.
///
/// The map kernel -> coefficient never stores a zero coefficient, so the empty
/// map is the only representation of 0 and `==` decides equality of values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SurdSum {
    terms: BTreeMap<BigUint, BigRational>,
}

impl SurdSum {
    pub fn from_rational(q: BigRational) -> Self {
        let mut s = SurdSum::default();
        s.add_term(BigUint::one(), q);
        s
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    /// sqrt(n) for a nonnegative integer.
    pub fn sqrt_of(n: u64) -> Self {
        surd_from(BigRational::one(), BigRational::from_integer(n.into()))
            .expect("nonnegative radicand")
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the value is rational (only the kernel-1 term, or zero).
    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|k| k.is_one())
    }

    /// Rational part (kernel 1).
    pub fn rational_part(&self) -> BigRational {
        self.terms.get(&BigUint::one()).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `coeff * sqrt(kernel)`; `kernel` must already be square-free.
    pub fn add_term(&mut self, kernel: BigUint, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(kernel) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, q: &BigRational) -> SurdSum {
        if q.is_zero() {
            return SurdSum::zero();
        }
        SurdSum { terms: self.terms.iter().map(|(k, c)| (k.clone(), c * q)).collect() }
    }

    pub fn scale_int(&self, n: i64) -> SurdSum {
        self.scale(&BigRational::from_integer(n.into()))
    }

    /// Multiply by a single term.
    pub fn mul_term(&self, t: &SurdTerm) -> SurdSum {
        let mut out = SurdSum::zero();
        if t.is_zero() {
            return out;
        }
        for (k, c) in &self.terms {
            let (g, kernel) = merge_kernels(k, &t.kernel);
            out.add_term(kernel, c * &t.coeff * BigRational::from_integer(BigInt::from(g)));
        }
        out
    }

    /// Correctly rounded per-term evaluation, summed in f64. Diagnostic only.
    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| rational_to_f64(c) * biguint_to_f64(k).sqrt())
            .sum()
    }

    /// The value as a single term, if it has at most one kernel.
    pub fn as_term(&self) -> Option<SurdTerm> {
        match self.terms.len() {
            0 => Some(SurdTerm::zero()),
            1 => {
                let (k, c) = self.terms.iter().next().unwrap();
                Some(SurdTerm { coeff: c.clone(), kernel: k.clone() })
            }
            _ => None,
        }
    }
}

/// sqrt(a) * sqrt(b) = g * sqrt(kernel) for square-free a, b.
fn merge_kernels(a: &BigUint, b: &BigUint) -> (BigUint, BigUint) {
    if a.is_one() {
        return (BigUint::one(), b.clone());
    }
    if b.is_one() {
        return (BigUint::one(), a.clone());
    }
    let g = a.gcd(b);
    let kernel = (a / &g) * (b / &g);
    (g, kernel)
}

fn biguint_to_f64(n: &BigUint) -> f64 {
    n.to_f64().unwrap_or(f64::INFINITY)
}

fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Square-free decomposition n = s^2 * k by trial division.
///
/// Trial division runs while d^3 <= remaining; what is left then has at most
/// two prime factors, so it is square-free unless it is a perfect square.
pub fn square_free_split(n: &BigUint) -> (BigUint, BigUint) {
    let mut rem = n.clone();
    let mut root = BigUint::one();
    let mut kernel = BigUint::one();
    if rem.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    let mut d = BigUint::from(2u32);
    loop {
        if &d * &d * &d > rem {
            break;
        }
        let mut e = 0u32;
        while (&rem % &d).is_zero() {
            rem /= &d;
            e += 1;
        }
        if e > 0 {
            root *= num_traits::pow(d.clone(), (e / 2) as usize);
            if e % 2 == 1 {
                kernel *= &d;
            }
        }
        d += if d == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
    if !rem.is_one() {
        let r = rem.sqrt();
        if &r * &r == rem {
            root *= r;
        } else {
            kernel *= rem;
        }
    }
    (root, kernel)
}

/// Normalize `coeff * sqrt(radicand)` into canonical form.
///
/// sqrt(p/q) = sqrt(p q) / q, then square factors leave the kernel.
pub fn surd_from(coeff: BigRational, radicand: BigRational) -> Result<SurdSum, SurdError> {
    if radicand.is_negative() {
        return Err(SurdError::NegativeRadicand(radicand.to_string()));
    }
    if coeff.is_zero() || radicand.is_zero() {
        return Ok(SurdSum::zero());
    }
    let p = radicand.numer().magnitude();
    let q = radicand.denom().magnitude();
    let (root, kernel) = square_free_split(&(p * q));
    let c = coeff * BigRational::new(BigInt::from(root), BigInt::from(q.clone()));
    let mut s = SurdSum::zero();
    s.add_term(kernel, c);
    Ok(s)
}

pub fn surd_add(a: &SurdSum, b: &SurdSum) -> SurdSum {
    a + b
}

pub fn surd_mul(a: &SurdSum, b: &SurdSum) -> SurdSum {
    a * b
}

pub fn surd_eq(a: &SurdSum, b: &SurdSum) -> bool {
    a == b
}

pub fn surd_to_float(a: &SurdSum) -> f64 {
    a.to_f64()
}

impl Zero for SurdSum {
    fn zero() -> Self {
        SurdSum::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for SurdSum {
    fn one() -> Self {
        SurdSum::from_integer(1)
    }
}

impl AddAssign<&SurdSum> for SurdSum {
    fn add_assign(&mut self, rhs: &SurdSum) {
        for (k, c) in &rhs.terms {
            self.add_term(k.clone(), c.clone());
        }
    }
}

impl AddAssign for SurdSum {
    fn add_assign(&mut self, rhs: SurdSum) {
        for (k, c) in rhs.terms {
            self.add_term(k, c);
        }
    }
}

impl SubAssign<&SurdSum> for SurdSum {
    fn sub_assign(&mut self, rhs: &SurdSum) {
        for (k, c) in &rhs.terms {
            self.add_term(k.clone(), -c);
        }
    }
}

impl SubAssign for SurdSum {
    fn sub_assign(&mut self, rhs: SurdSum) {
        *self -= &rhs;
    }
}

impl Add for SurdSum {
    type Output = SurdSum;
    fn add(mut self, rhs: SurdSum) -> SurdSum {
        self += rhs;
        self
    }
}

impl Add<&SurdSum> for &SurdSum {
    type Output = SurdSum;
    fn add(self, rhs: &SurdSum) -> SurdSum {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for SurdSum {
    type Output = SurdSum;
    fn sub(mut self, rhs: SurdSum) -> SurdSum {
        self -= &rhs;
        self
    }
}

impl Sub<&SurdSum> for &SurdSum {
    type Output = SurdSum;
    fn sub(self, rhs: &SurdSum) -> SurdSum {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for SurdSum {
    type Output = SurdSum;
    fn neg(mut self) -> SurdSum {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Neg for &SurdSum {
    type Output = SurdSum;
    fn neg(self) -> SurdSum {
        -self.clone()
    }
}

impl Mul<&SurdSum> for &SurdSum {
    type Output = SurdSum;
    fn mul(self, rhs: &SurdSum) -> SurdSum {
        let mut out = SurdSum::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                let (g, kernel) = merge_kernels(ka, kb);
                out.add_term(kernel, ca * cb * BigRational::from_integer(BigInt::from(g)));
            }
        }
        out
    }
}

impl Mul for SurdSum {
    type Output = SurdSum;
    fn mul(self, rhs: SurdSum) -> SurdSum {
        &self * &rhs
    }
}

impl MulAssign<&SurdSum> for SurdSum {
    fn mul_assign(&mut self, rhs: &SurdSum) {
        *self = &*self * rhs;
    }
}

impl MulAssign for SurdSum {
    fn mul_assign(&mut self, rhs: SurdSum) {
        *self = &*self * &rhs;
    }
}

impl Sum for SurdSum {
    fn sum<I: Iterator<Item = SurdSum>>(iter: I) -> SurdSum {
        let mut acc = SurdSum::zero();
        for x in iter {
            acc += x;
        }
        acc
    }
}

impl<'a> Sum<&'a SurdSum> for SurdSum {
    fn sum<I: Iterator<Item = &'a SurdSum>>(iter: I) -> SurdSum {
        let mut acc = SurdSum::zero();
        for x in iter {
            acc += x;
        }
        acc
    }
}

impl From<SurdTerm> for SurdSum {
    fn from(t: SurdTerm) -> Self {
        t.to_surd()
    }
}

fn fmt_rational_abs(q: &BigRational) -> String {
    let n = q.numer().magnitude();
    let d = q.denom();
    if d.is_one() {
        n.to_string()
    } else {
        format!("{n}/{d}")
    }
}

impl fmt::Display for SurdSum {
    /// Terms sorted by kernel: `-1/2`, `1/3*sqrt(6)`, `1/2+sqrt(3)`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            let mag = fmt_rational_abs(c);
            if k.is_one() {
                write!(f, "{mag}")?;
            } else if c.abs().is_one() {
                write!(f, "sqrt({k})")?;
            } else {
                write!(f, "{mag}*sqrt({k})")?;
            }
        }
        Ok(())
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
    }
}

fn parse_term(t: &str) -> Option<SurdSum> {
    let t = t.trim();
    let (coeff, radicand) = if let Some(rest) = t.strip_prefix("sqrt(") {
        (BigRational::one(), rest.strip_suffix(')')?)
    } else if let Some((c, r)) = t.split_once("*sqrt(") {
        (parse_rational(c)?, r.strip_suffix(')')?)
    } else {
        return parse_rational(t).map(SurdSum::from_rational);
    };
    let rad = parse_rational(radicand)?;
    surd_from(coeff, rad).ok()
}

impl FromStr for SurdSum {
    type Err = ParseError;

    /// Parses the text format written by `Display`. Radicands need not be
    /// square-free; they are normalized.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseError::Surd(s.to_string());
        let body: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if body.is_empty() {
            return Err(bad());
        }
        let mut out = SurdSum::zero();
        let mut start = 0;
        let bytes = body.as_bytes();
        let mut depth = 0i32;
        let mut pieces = Vec::new();
        for (i, &b) in bytes.iter().enumerate() {
            match b {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'+' | b'-' if depth == 0 && i > start => {
                    pieces.push(&body[start..i]);
                    start = i;
                }
                _ => {}
            }
        }
        pieces.push(&body[start..]);
        for piece in pieces {
            let (sign, rest) = match piece.as_bytes()[0] {
                b'-' => (-1, &piece[1..]),
                b'+' => (1, &piece[1..]),
                _ => (1, piece),
            };
            let term = parse_term(rest).ok_or_else(bad)?;
            if sign < 0 {
                out -= &term;
            } else {
                out += &term;
            }
        }
        Ok(out)
    }
}

impl From<i64> for SurdSum {
    fn from(n: i64) -> Self {
        SurdSum::from_integer(n)
    }
}

impl SurdSum {
    /// Sign of the value, decided exactly when rational and otherwise by a
    /// float evaluation (adequate for display ordering only).
    pub fn approx_sign(&self) -> Sign {
        if self.is_zero() {
            Sign::NoSign
        } else if self.to_f64() < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}
