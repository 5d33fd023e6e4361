//! Second-kind bracket values and the full-sum versus single-term invariant.

mod common;

use common::h;
use proptest::prelude::*;
use spinnet::wigner::wigner_6j_term;
use spinnet::{pi_squared, second_kind, single_x_reduction, triangle, SecondKindBracket};
use surd::{phase_twice, HalfInt, SurdSum};

fn bracket(top: &[i32], mid: &[i32], bottom: &[i32]) -> SecondKindBracket {
    let row = |r: &[i32]| r.iter().map(|&t| h(t)).collect::<Vec<_>>();
    SecondKindBracket::new(row(top), row(mid), row(bottom)).unwrap()
}

#[test]
fn all_zero_nine_j_is_one() {
    let b = bracket(&[0; 3], &[0; 3], &[0; 3]);
    assert_eq!(second_kind::<SurdSum>(&b), SurdSum::from_integer(1));
    assert_eq!(single_x_reduction::<SurdSum>(&b, HalfInt::ZERO).unwrap(), SurdSum::from_integer(1));
}

#[test]
fn vacuum_to_half_is_the_single_x_product() {
    // j = 0 on the top row, k = 1/2 on the bottom row, spectators 0
    let b = bracket(&[0; 3], &[0; 3], &[1; 3]);
    let x = HalfInt::HALF;
    let mut prod = SurdSum::from_integer(pi_squared(&[x]));
    for i in 0..3 {
        prod = &prod * &wigner_6j_term(b.factor_args(i, x)).to_surd();
    }
    let sign = phase_twice(b.twice_total() - 3 * x.twice() as i64);
    assert_eq!(second_kind::<SurdSum>(&b), prod.scale_int(sign as i64));
}

#[test]
fn unclosable_column_is_zero() {
    let b = bracket(&[0, 0, 0], &[0, 0, 0], &[4, 0, 0]);
    assert!(second_kind::<SurdSum>(&b).is_zero());
}

#[test]
fn single_x_requires_column_triads() {
    let b = bracket(&[0; 3], &[0; 3], &[2; 3]);
    assert!(single_x_reduction::<SurdSum>(&b, HalfInt::HALF).is_err());
}

fn rows_with_common_s() -> impl Strategy<Value = (SecondKindBracket, HalfInt)> {
    (prop::sample::select(vec![3usize, 4, 6]), 1..=4i32).prop_flat_map(|(n, s)| {
        let top = prop::collection::vec(0..=4i32, n);
        let mid = prop::collection::vec(0..=4i32, n);
        let step = prop::collection::vec(0..=s as usize, n);
        (top, mid, step, Just(s)).prop_filter_map("column triads", |(top, mid, step, s)| {
            // bottom_i in the window |top_i - s| ..= top_i + s, same parity as top_i + s
            let bottom: Vec<i32> = top.iter().zip(&step).map(|(&t, &k)| (t - s).abs() + 2 * k as i32).collect();
            let ok = bottom.iter().zip(&top).all(|(&b, &t)| b <= 4 && b <= t + s && triangle(h(t), h(b), h(s)));
            ok.then(|| (bracket(&top, &mid, &bottom), h(s)))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Stated invariant: once every column closes with a common s, the full x-sum
    /// collapses to its x = s term.
    #[test]
    fn full_sum_equals_single_term((b, s) in rows_with_common_s()) {
        let full: SurdSum = second_kind(&b);
        let single: SurdSum = single_x_reduction(&b, s).unwrap();
        prop_assert_eq!(full, single, "{} s={}", b, s);
    }
}
