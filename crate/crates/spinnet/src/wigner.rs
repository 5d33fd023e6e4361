//! Triangle predicate, Pi factors, Wigner 3j, Clebsch-Gordan and 6j symbols.
//!
//! Every symbol is evaluated exactly from the Racah single-sum formula. The
//! radicand is a ratio of factorials kept as a [`FactoredInt`]; the alternating
//! sum is accumulated in big rationals. 6j values are memoized under the
//! canonical representative of their 24-element symmetry orbit.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use num_traits::Zero;
use parking_lot::RwLock;
use surd::{factorial_factored, phase_twice, BigInt, BigRational, FactoredInt, HalfInt, Scalar, SurdTerm};

use crate::error::{Result, SpinError};

/// True iff |a-b| <= c <= a+b, a+b+c is an integer and no argument is negative.
pub fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
    let (a, b, c) = (a.twice(), b.twice(), c.twice());
    a >= 0 && b >= 0 && c >= 0 && (a - b).abs() <= c && c <= a + b && (a + b + c) % 2 == 0
}

/// sqrt((2j1+1)(2j2+1)...) as an exact term.
pub fn pi_term(js: &[HalfInt]) -> SurdTerm {
    let mut prod = FactoredInt::one();
    for j in js {
        debug_assert!(j.twice() >= 0);
        prod.mul_assign_ref(&FactoredInt::from_u64(j.dim() as u64));
    }
    SurdTerm::from_factored(BigRational::from_integer(1.into()), &prod)
}

/// Pi(js) = sqrt(prod (2j+1)).
pub fn pi_factor<S: Scalar>(js: &[HalfInt]) -> S {
    S::from_term(&pi_term(js))
}

/// Pi^2(js) = prod (2j+1), an integer.
pub fn pi_squared(js: &[HalfInt]) -> i64 {
    js.iter().map(|j| j.dim()).product()
}

fn try_fact(n: i32) -> Result<FactoredInt> {
    Ok(factorial_factored(n as u64)?)
}

/// Triangle coefficient radicand (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)! in twice units.
fn delta_sq(a: i32, b: i32, c: i32) -> Result<FactoredInt> {
    let mut r = try_fact((a + b - c) / 2)?;
    r.mul_assign_ref(&try_fact((a - b + c) / 2)?);
    r.mul_assign_ref(&try_fact((-a + b + c) / 2)?);
    r.div_assign_ref(&try_fact((a + b + c) / 2 + 1)?);
    Ok(r)
}

fn check_projection(j: HalfInt, m: HalfInt) -> Result<()> {
    if j.twice() < 0 {
        return Err(SpinError::NegativeSpin(j));
    }
    if (j.twice() - m.twice()) % 2 != 0 || m.twice().abs() > j.twice() {
        return Err(SpinError::Projection { j, m });
    }
    Ok(())
}

/// Sum of `sign * ratio` where each ratio is a product of factorials.
///
/// `terms` yields (numerator factorial args, denominator factorial args) per
/// summation index; the sign alternates starting from `first_sign`.
fn alternating_sum<I>(terms: I, first_sign: i32) -> Result<BigRational>
where
    I: Iterator<Item = (Vec<i32>, Vec<i32>)>,
{
    let mut acc = BigRational::zero();
    let mut sign = first_sign;
    for (num, den) in terms {
        let mut f = FactoredInt::one();
        for n in num {
            f.mul_assign_ref(&try_fact(n)?);
        }
        for d in den {
            f.div_assign_ref(&try_fact(d)?);
        }
        let q = f.to_rational();
        if sign > 0 {
            acc += q;
        } else {
            acc -= q;
        }
        sign = -sign;
    }
    Ok(acc)
}

/// Wigner 3j symbol as an exact term.
///
/// Zero unless the triangle condition holds and m1+m2+m3 = 0.
pub fn wigner_3j_term(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> Result<SurdTerm> {
    check_projection(j1, m1)?;
    check_projection(j2, m2)?;
    check_projection(j3, m3)?;
    if m1.twice() + m2.twice() + m3.twice() != 0 || !triangle(j1, j2, j3) {
        return Ok(SurdTerm::zero());
    }
    let (a, b, c) = (j1.twice(), j2.twice(), j3.twice());
    let (ma, mb, mc) = (m1.twice(), m2.twice(), m3.twice());

    let mut rad = delta_sq(a, b, c)?;
    for n in [(a + ma) / 2, (a - ma) / 2, (b + mb) / 2, (b - mb) / 2, (c + mc) / 2, (c - mc) / 2] {
        rad.mul_assign_ref(&try_fact(n)?);
    }

    // k runs over the range where all six denominator factorials are defined.
    let kmin = 0.max((b - c - ma) / 2).max((a - c + mb) / 2);
    let kmax = ((a + b - c) / 2).min((a - ma) / 2).min((b + mb) / 2);
    let terms = (kmin..=kmax).map(|k| {
        (
            Vec::new(),
            vec![
                k,
                (c - b + ma) / 2 + k,
                (c - a - mb) / 2 + k,
                (a + b - c) / 2 - k,
                (a - ma) / 2 - k,
                (b + mb) / 2 - k,
            ],
        )
    });
    let first = if kmin % 2 == 0 { 1 } else { -1 };
    let sum = alternating_sum(terms, first)?;
    let sign = phase_twice((a - b - mc) as i64);
    Ok(SurdTerm::from_factored(sum, &rad).signed(sign))
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3).
pub fn wigner_3j<S: Scalar>(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> Result<S> {
    wigner_3j_term(j1, j2, j3, m1, m2, m3).map(|t| S::from_term(&t))
}

/// Clebsch-Gordan coefficient <j1 m1 j2 m2 | J M> as an exact term.
///
/// Condon-Shortley convention: <j1 m1 j2 m2|J M> = (-1)^(j1-j2+M) sqrt(2J+1) (j1 j2 J; m1 m2 -M).
pub fn clebsch_gordan_term(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<SurdTerm> {
    check_projection(j1, m1)?;
    check_projection(j2, m2)?;
    check_projection(j, m)?;
    if m1 + m2 != m || !triangle(j1, j2, j) {
        return Ok(SurdTerm::zero());
    }
    let three = wigner_3j_term(j1, j2, j, m1, m2, -m)?;
    let sign = phase_twice((j1.twice() - j2.twice() + m.twice()) as i64);
    Ok(three.mul(&SurdTerm::sqrt_of(j.dim() as u64)).signed(sign))
}

/// Clebsch-Gordan coefficient <j1 m1 j2 m2 | J M>.
pub fn clebsch_gordan<S: Scalar>(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<S> {
    clebsch_gordan_term(j1, m1, j2, m2, j, m).map(|t| S::from_term(&t))
}

/// The four triads {j1 j2 j3}, {j1 j5 j6}, {j4 j2 j6}, {j4 j5 j3} of a 6j symbol.
pub fn six_j_triads(j: [HalfInt; 6]) -> [[HalfInt; 3]; 4] {
    [[j[0], j[1], j[2]], [j[0], j[4], j[5]], [j[3], j[1], j[5]], [j[3], j[4], j[2]]]
}

/// Canonical memo key of a 6j symbol: the lexicographically smallest of the
/// 24 arrangements related by column permutations and by exchanging upper and
/// lower entries in two columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SixJKey([i32; 6]);

const COLUMN_PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
const ROW_FLIPS: [[bool; 3]; 4] = [
    [false, false, false],
    [true, true, false],
    [true, false, true],
    [false, true, true],
];

impl SixJKey {
    /// Every arrangement in the symmetry orbit of `{j0 j1 j2; j3 j4 j5}` (twice units).
    pub fn orbit(t: [i32; 6]) -> Vec<[i32; 6]> {
        let mut out = Vec::with_capacity(24);
        for perm in COLUMN_PERMS {
            for flip in ROW_FLIPS {
                let mut v = [0; 6];
                for (col, &src) in perm.iter().enumerate() {
                    let (up, lo) = (t[src], t[src + 3]);
                    let (up, lo) = if flip[col] { (lo, up) } else { (up, lo) };
                    v[col] = up;
                    v[col + 3] = lo;
                }
                out.push(v);
            }
        }
        out
    }

    pub fn canonical(j: [HalfInt; 6]) -> SixJKey {
        let t = j.map(HalfInt::twice);
        SixJKey(Self::orbit(t).into_iter().min().expect("orbit is nonempty"))
    }

    /// The six arguments in twice units.
    pub fn twice(&self) -> [i32; 6] {
        self.0
    }

    pub fn args(&self) -> [HalfInt; 6] {
        self.0.map(HalfInt::from_twice)
    }
}

impl fmt::Display for SixJKey {
    /// Six space-separated twice-j integers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for SixJKey {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self> {
        let nums: std::result::Result<Vec<i32>, _> = s.split_whitespace().map(str::parse).collect();
        let nums = nums.map_err(|_| SpinError::Invalid(format!("bad 6j key `{s}`")))?;
        let arr: [i32; 6] = nums
            .try_into()
            .map_err(|_| SpinError::Invalid(format!("6j key needs six integers: `{s}`")))?;
        if arr.iter().any(|&x| x < 0) {
            return Err(SpinError::Invalid(format!("negative entry in 6j key `{s}`")));
        }
        Ok(SixJKey::canonical(arr.map(HalfInt::from_twice)))
    }
}

static SIX_J_MEMO: LazyLock<RwLock<HashMap<SixJKey, SurdTerm>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Racah single sum for {a b c; d e f}, no memo.
pub fn racah_6j(j: [HalfInt; 6]) -> Result<SurdTerm> {
    if j.iter().any(|x| x.twice() < 0) {
        return Err(SpinError::NegativeSpin(*j.iter().find(|x| x.twice() < 0).unwrap()));
    }
    if !six_j_triads(j).iter().all(|t| triangle(t[0], t[1], t[2])) {
        return Ok(SurdTerm::zero());
    }
    let [a, b, c, d, e, f] = j.map(HalfInt::twice);
    let mut rad = delta_sq(a, b, c)?;
    rad.mul_assign_ref(&delta_sq(a, e, f)?);
    rad.mul_assign_ref(&delta_sq(d, b, f)?);
    rad.mul_assign_ref(&delta_sq(d, e, c)?);

    let t = [(a + b + c) / 2, (a + e + f) / 2, (d + b + f) / 2, (d + e + c) / 2];
    let p = [(a + b + d + e) / 2, (a + c + d + f) / 2, (b + c + e + f) / 2];
    let zmin = *t.iter().max().unwrap();
    let zmax = *p.iter().min().unwrap();
    let terms = (zmin..=zmax).map(|z| {
        (
            vec![z + 1],
            vec![z - t[0], z - t[1], z - t[2], z - t[3], p[0] - z, p[1] - z, p[2] - z],
        )
    });
    let first = if zmin % 2 == 0 { 1 } else { -1 };
    let sum = alternating_sum(terms, first)?;
    Ok(SurdTerm::from_factored(sum, &rad))
}

/// 6j symbol {j1 j2 j3; j4 j5 j6} as an exact term, memoized.
///
/// # Panics
/// If a factorial beyond the configured limit is needed.
pub fn wigner_6j_term(j: [HalfInt; 6]) -> SurdTerm {
    try_wigner_6j_term(j).unwrap_or_else(|e| panic!("6j evaluation failed: {e}"))
}

/// Fallible form of [`wigner_6j_term`].
pub fn try_wigner_6j_term(j: [HalfInt; 6]) -> Result<SurdTerm> {
    if j.iter().any(|x| x.twice() < 0) {
        return Ok(SurdTerm::zero());
    }
    if !six_j_triads(j).iter().all(|t| triangle(t[0], t[1], t[2])) {
        return Ok(SurdTerm::zero());
    }
    let key = SixJKey::canonical(j);
    if let Some(v) = SIX_J_MEMO.read().get(&key) {
        return Ok(v.clone());
    }
    // Evaluate at the canonical arguments so every orbit member shares one value.
    let v = racah_6j(key.args())?;
    SIX_J_MEMO.write().entry(key).or_insert_with(|| v.clone());
    Ok(v)
}

/// 6j symbol {j1 j2 j3; j4 j5 j6}.
pub fn wigner_6j<S: Scalar>(j: [HalfInt; 6]) -> S {
    S::from_term(&wigner_6j_term(j))
}

/// Number of memoized 6j values.
pub fn six_j_cache_len() -> usize {
    SIX_J_MEMO.read().len()
}

pub fn clear_6j_cache() {
    SIX_J_MEMO.write().clear();
}

/// Snapshot of the memo, sorted by key.
pub fn export_6j_cache() -> Vec<(SixJKey, SurdTerm)> {
    let mut v: Vec<_> = SIX_J_MEMO.read().iter().map(|(k, t)| (*k, t.clone())).collect();
    v.sort_by_key(|e| e.0);
    v
}

/// Insert precomputed values. Keys are re-canonicalized; existing entries win.
pub fn import_6j_cache<I: IntoIterator<Item = (SixJKey, SurdTerm)>>(entries: I) -> usize {
    let mut memo = SIX_J_MEMO.write();
    let mut added = 0;
    for (k, t) in entries {
        let k = SixJKey::canonical(k.args());
        if let std::collections::hash_map::Entry::Vacant(v) = memo.entry(k) {
            v.insert(t);
            added += 1;
        }
    }
    added
}

/// (2x+1) as a term.
pub(crate) fn dim_term(x: HalfInt) -> SurdTerm {
    SurdTerm::rational(BigRational::from_integer(BigInt::from(x.dim())))
}

/// All 6j symbols with every argument <= jmax and all four triads satisfied,
/// in lexicographic order of the twice-j arguments.
pub fn admissible_6j(jmax: HalfInt) -> Vec<[HalfInt; 6]> {
    let top = jmax.twice().max(0);
    let mut out = Vec::new();
    let range = || 0..=top;
    for a in range() {
        for b in range() {
            for c in range() {
                if !triangle(h(a), h(b), h(c)) {
                    continue;
                }
                for d in range() {
                    for e in range() {
                        if !triangle(h(d), h(e), h(c)) {
                            continue;
                        }
                        for f in range() {
                            if triangle(h(a), h(e), h(f)) && triangle(h(d), h(b), h(f)) {
                                out.push([h(a), h(b), h(c), h(d), h(e), h(f)]);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn h(t: i32) -> HalfInt {
    HalfInt::from_twice(t)
}

/// Parse helper: a spin given as `3/2`, `1` or (with `twice`) as a twice-j integer.
pub fn parse_spin(s: &str, twice: bool) -> Result<HalfInt> {
    let v = if twice {
        let n: i32 = s
            .trim()
            .parse()
            .map_err(|_| SpinError::Invalid(format!("bad twice-j integer `{s}`")))?;
        HalfInt::from_twice(n)
    } else {
        s.parse::<HalfInt>()?
    };
    if v.is_negative() {
        return Err(SpinError::NegativeSpin(v));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use surd::SurdSum;

    fn hs(v: &[i32]) -> Vec<HalfInt> {
        v.iter().map(|&t| HalfInt::from_twice(t)).collect()
    }

    fn six(v: [i32; 6]) -> [HalfInt; 6] {
        v.map(HalfInt::from_twice)
    }

    #[test]
    fn triangle_examples() {
        assert!(triangle(h(1), h(1), h(2)));
        assert!(!triangle(h(1), h(1), h(1)));
        assert!(!triangle(h(2), h(6), h(2)));
        assert!(!triangle(h(-1), h(1), h(0)));
    }

    #[test]
    fn pi_examples() {
        assert_eq!(pi_factor::<SurdSum>(&[]), SurdSum::from_integer(1));
        assert_eq!(pi_factor::<SurdSum>(&hs(&[1, 1])), SurdSum::from_integer(2));
        assert_eq!(pi_factor::<SurdSum>(&hs(&[1, 1, 1, 1])), SurdSum::from_integer(4));
        assert_eq!(pi_factor::<SurdSum>(&hs(&[2])), SurdSum::sqrt_of(3));
    }

    #[test]
    fn three_j_examples() {
        let z = HalfInt::ZERO;
        assert_eq!(wigner_3j::<SurdSum>(z, z, z, z, z, z).unwrap(), SurdSum::from_integer(1));
        // (1/2 1/2 0; 1/2 -1/2 0) = (-1)^(1/2-1/2)/sqrt(2)
        let v = wigner_3j::<SurdSum>(h(1), h(1), z, h(1), h(-1), z).unwrap();
        assert_eq!(v, "1/2*sqrt(2)".parse().unwrap());
        // (1/2 1/2 1; 1/2 -1/2 0) = 1/sqrt(6)
        let v = wigner_3j::<SurdSum>(h(1), h(1), h(2), h(1), h(-1), z).unwrap();
        assert_eq!(v, "1/6*sqrt(6)".parse().unwrap());
        assert!(wigner_3j::<SurdSum>(h(1), h(1), h(2), h(0), h(0), z).is_err());
        assert!(wigner_3j::<SurdSum>(h(1), h(1), h(2), h(3), h(-3), z).is_err());
    }

    #[test]
    fn cg_examples() {
        let v = clebsch_gordan::<SurdSum>(h(1), h(1), h(1), h(-1), h(0), h(0)).unwrap();
        assert_eq!(v, "1/2*sqrt(2)".parse().unwrap());
        let v = clebsch_gordan::<SurdSum>(h(3), h(3), h(2), h(2), h(5), h(5)).unwrap();
        assert_eq!(v, SurdSum::from_integer(1));
        let v = clebsch_gordan::<SurdSum>(h(1), h(1), h(1), h(1), h(2), h(0)).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn six_j_examples() {
        assert_eq!(wigner_6j::<SurdSum>(six([0; 6])), SurdSum::from_integer(1));
        assert_eq!(wigner_6j::<SurdSum>(six([1, 1, 0, 1, 1, 0])), SurdSum::from_ratio(-1, 2));
        assert_eq!(wigner_6j::<SurdSum>(six([1, 1, 2, 1, 1, 2])), SurdSum::from_ratio(1, 6));
        assert!(wigner_6j::<SurdSum>(six([1, 1, 1, 1, 1, 1])).is_zero());
        let f: f64 = wigner_6j(six([2, 2, 2, 2, 2, 2]));
        assert!((f - 1.0 / 6.0).abs() < 1e-15);
        let g: f32 = wigner_6j(six([1, 1, 2, 1, 1, 2]));
        assert!((g - 1.0 / 6.0).abs() < 1e-7);
    }

    #[test]
    fn canonical_key_is_orbit_invariant() {
        let j = [1, 3, 2, 4, 3, 2];
        let k = SixJKey::canonical(six(j));
        for o in SixJKey::orbit(j) {
            assert_eq!(SixJKey::canonical(six(o)), k);
        }
        assert_eq!(SixJKey::orbit(j).len(), 24);
        let parsed: SixJKey = k.to_string().parse().unwrap();
        assert_eq!(parsed, k);
    }

    #[test]
    fn admissible_count_small() {
        assert_eq!(admissible_6j(HalfInt::ZERO).len(), 1);
        for j in admissible_6j(HalfInt::ONE) {
            assert!(six_j_triads(j).iter().all(|t| triangle(t[0], t[1], t[2])));
        }
    }
}
