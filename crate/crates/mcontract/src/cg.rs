//! Clebsch-Gordan coefficients by explicit state construction.
//!
//! The highest state |J, J> of the coupled pair is fixed by J+ |J, J> = 0,
//! unit norm and a positive <j1 j1, j2 J-j1 | J J> (Condon-Shortley). Lower
//! states follow from repeated application of J- = J1- + J2-. No closed-form
//! Racah expression is used.

use std::collections::HashMap;

use surd::{phase_twice, surd_from, BigInt, BigRational, HalfInt, SurdSum};

/// j(j+1) - m(m+1) for twice-unit arguments, as a rational.
fn ladder_sq(jt: i32, mt: i32, raise: bool) -> BigRational {
    let (jt, mt) = (jt as i64, mt as i64);
    let num = if raise { jt * (jt + 2) - mt * (mt + 2) } else { jt * (jt + 2) - mt * (mt - 2) };
    BigRational::new(BigInt::from(num), BigInt::from(4))
}

fn sqrt_q(q: &BigRational) -> SurdSum {
    surd_from(BigRational::from_integer(1.into()), q.clone()).expect("nonnegative radicand")
}

fn inv_sqrt_q(q: &BigRational) -> SurdSum {
    sqrt_q(&(BigRational::from_integer(1.into()) / q))
}

/// Every coefficient <j1 m1 j2 m2 | J M> for fixed (j1, j2, J), keyed by (twice m1, twice M).
pub(crate) fn cg_table(j1t: i32, j2t: i32, jt: i32) -> CgTable {
    let mut out = HashMap::new();
    if jt < (j1t - j2t).abs() || jt > j1t + j2t || (j1t + j2t + jt) % 2 != 0 {
        return out;
    }
    // highest weight: coefficients c(m1) with m2 = J - m1
    let lo = (-j1t).max(jt - j2t);
    let hi = j1t.min(jt + j2t);
    let mut state: Vec<(i32, SurdSum)> = Vec::new();
    let mut c = SurdSum::from_integer(1);
    state.push((lo, c.clone()));
    let mut m1 = lo;
    while m1 < hi {
        // c(m1+1) B(m1+1) = -c(m1) A(m1)
        let a = ladder_sq(j1t, m1, true);
        let b = ladder_sq(j2t, jt - m1 - 2, true);
        c = -(&(&c * &sqrt_q(&a)) * &inv_sqrt_q(&b));
        m1 += 2;
        state.push((m1, c.clone()));
    }
    let norm_sq = state.iter().fold(SurdSum::default(), |acc, (_, v)| &acc + &(v * v));
    let norm_sq = norm_sq.as_term().expect("squared norm is rational").coeff;
    let mut scale = inv_sqrt_q(&norm_sq);
    let top = state.iter().find(|(m, _)| *m == j1t).expect("m1 = j1 present").1.clone();
    if top.to_f64() < 0.0 {
        scale = -scale;
    }
    let mut cur: HashMap<i32, SurdSum> = state.into_iter().map(|(m, v)| (m, &v * &scale)).collect();
    let mut mt = jt;
    loop {
        for (&m, v) in &cur {
            if !v.is_zero() {
                out.insert((m, mt), v.clone());
            }
        }
        if mt == -jt {
            break;
        }
        // J- |J M> = sqrt(J(J+1) - M(M-1)) |J M-1>
        let mut next: HashMap<i32, SurdSum> = HashMap::new();
        for (&m, v) in &cur {
            let m2 = mt - m;
            if m - 2 >= -j1t {
                let t = v * &sqrt_q(&ladder_sq(j1t, m, false));
                *next.entry(m - 2).or_default() += &t;
            }
            if m2 - 2 >= -j2t {
                let t = v * &sqrt_q(&ladder_sq(j2t, m2, false));
                *next.entry(m).or_default() += &t;
            }
        }
        let inv = inv_sqrt_q(&ladder_sq(jt, mt, false));
        cur = next.into_iter().map(|(m, v)| (m, &v * &inv)).collect();
        mt -= 2;
    }
    out
}

/// Coefficients of one (j1, j2, J) coupling keyed by (twice m1, twice M).
type CgTable = HashMap<(i32, i32), SurdSum>;

/// Per-evaluation cache of coupling tables; never shared between calls of the public API.
#[derive(Default)]
pub struct CgContext {
    tables: HashMap<(i32, i32, i32), CgTable>,
}

fn valid(j: HalfInt, m: HalfInt) -> bool {
    j.twice() >= 0 && m.twice().abs() <= j.twice() && (j.twice() - m.twice()) % 2 == 0
}

impl CgContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// <j1 m1 j2 m2 | J M>; zero for any invalid or uncoupled combination.
    pub fn cg(&mut self, j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> SurdSum {
        if !(valid(j1, m1) && valid(j2, m2) && valid(j, m)) || m1.twice() + m2.twice() != m.twice() {
            return SurdSum::default();
        }
        let table = self
            .tables
            .entry((j1.twice(), j2.twice(), j.twice()))
            .or_insert_with(|| cg_table(j1.twice(), j2.twice(), j.twice()));
        table.get(&(m1.twice(), m.twice())).cloned().unwrap_or_default()
    }

    /// (j1 j2 j3; m1 m2 m3) = (-1)^(j1-j2-m3) / sqrt(2 j3 + 1) <j1 m1 j2 m2 | j3 -m3>.
    pub fn three_j(&mut self, j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> SurdSum {
        let c = self.cg(j1, m1, j2, m2, j3, -m3);
        if c.is_zero() {
            return c;
        }
        let sign = phase_twice((j1.twice() - j2.twice() - m3.twice()) as i64);
        let inv = inv_sqrt_q(&BigRational::from_integer(j3.dim().into()));
        (&c * &inv).scale_int(sign as i64)
    }
}

/// <j1 m1 j2 m2 | J M> from the highest-weight construction.
pub fn oracle_cg(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> SurdSum {
    CgContext::new().cg(j1, m1, j2, m2, j, m)
}

/// Wigner 3j symbol from [`oracle_cg`].
pub fn oracle_3j(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> SurdSum {
    CgContext::new().three_j(j1, j2, j3, m1, m2, m3)
}
