//! 6j symbols as a contraction of four 3j symbols.

use surd::{phase_twice, HalfInt, SurdSum};

use crate::cg::CgContext;

/// {j1 j2 j3; j4 j5 j6} as the m-sum
///
/// ```text
/// sum_p (-1)^(j4+p4 + j5+p5 + j6+p6)
///   (j1 j2 j3; p1 p2 p3) (j1 j5 j6; p1 p5 -p6) (j4 j2 j6; -p4 p2 p6) (j4 j5 j3; p4 -p5 p3)
/// ```
///
/// with every 3j taken from the highest-weight Clebsch-Gordan construction.
/// Zero when any argument is negative.
pub fn oracle_6j(j: [HalfInt; 6]) -> SurdSum {
    if j.iter().any(|x| x.is_negative()) {
        return SurdSum::default();
    }
    let mut ctx = CgContext::new();
    let [j1, j2, j3, j4, j5, j6] = j;
    let mut acc = SurdSum::default();
    for p1 in j1.projections() {
        for p2 in j2.projections() {
            let p3 = -(p1 + p2);
            if p3.twice().abs() > j3.twice() {
                continue;
            }
            let a = ctx.three_j(j1, j2, j3, p1, p2, p3);
            if a.is_zero() {
                continue;
            }
            for p5 in j5.projections() {
                let p6 = p1 + p5;
                if p6.twice().abs() > j6.twice() {
                    continue;
                }
                let p4 = p2 + p6;
                if p4.twice().abs() > j4.twice() {
                    continue;
                }
                let b = ctx.three_j(j1, j5, j6, p1, p5, -p6);
                let c = ctx.three_j(j4, j2, j6, -p4, p2, p6);
                let d = ctx.three_j(j4, j5, j3, p4, -p5, p3);
                if b.is_zero() || c.is_zero() || d.is_zero() {
                    continue;
                }
                let e: i64 = [(j4, p4), (j5, p5), (j6, p6)].iter().map(|(x, p)| (x.twice() + p.twice()) as i64).sum();
                let term = &(&(&a * &b) * &c) * &d;
                acc += &term.scale_int(phase_twice(e) as i64);
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn six(t: [i32; 6]) -> [HalfInt; 6] {
        t.map(HalfInt::from_twice)
    }

    #[test]
    fn known_values() {
        assert_eq!(oracle_6j(six([0; 6])), SurdSum::from_integer(1));
        assert_eq!(oracle_6j(six([1, 1, 0, 1, 1, 0])), SurdSum::from_ratio(-1, 2));
        assert_eq!(oracle_6j(six([1, 1, 2, 1, 1, 2])), SurdSum::from_ratio(1, 6));
        assert!(oracle_6j(six([1, 1, 1, 1, 1, 1])).is_zero());
        assert!(oracle_6j(six([0, 2, 6, 0, 0, 0])).is_zero());
    }
}
