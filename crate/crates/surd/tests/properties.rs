use proptest::prelude::*;
use surd::{
    factorial_factored, surd_add, surd_eq, surd_from, surd_mul, surd_to_float, BigRational,
    HalfInt, SurdSum,
};

fn rational() -> impl Strategy<Value = BigRational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn surd_value() -> impl Strategy<Value = SurdSum> {
    prop::collection::vec((rational(), 0u64..400), 0..5).prop_map(|terms| {
        let mut acc = SurdSum::default();
        for (c, r) in terms {
            acc += surd_from(c, BigRational::from_integer(r.into())).unwrap();
        }
        acc
    })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn addition_is_associative_and_commutative(a in surd_value(), b in surd_value(), c in surd_value()) {
        prop_assert_eq!(surd_add(&surd_add(&a, &b), &c), surd_add(&a, &surd_add(&b, &c)));
        prop_assert_eq!(surd_add(&a, &b), surd_add(&b, &a));
    }

    #[test]
    fn multiplication_is_associative_and_commutative(a in surd_value(), b in surd_value(), c in surd_value()) {
        prop_assert_eq!(surd_mul(&surd_mul(&a, &b), &c), surd_mul(&a, &surd_mul(&b, &c)));
        prop_assert_eq!(surd_mul(&a, &b), surd_mul(&b, &a));
    }

    #[test]
    fn multiplication_distributes(a in surd_value(), b in surd_value(), c in surd_value()) {
        let lhs = surd_mul(&a, &surd_add(&b, &c));
        let rhs = surd_add(&surd_mul(&a, &b), &surd_mul(&a, &c));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn additive_inverse_and_units(a in surd_value()) {
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(surd_mul(&a, &SurdSum::from_integer(1)), a.clone());
        prop_assert_eq!(surd_add(&a, &SurdSum::default()), a.clone());
    }

    #[test]
    fn float_agrees_with_per_term_evaluation(a in surd_value()) {
        let per_term: f64 = a
            .terms()
            .map(|(k, c)| {
                let c = c.numer().to_string().parse::<f64>().unwrap()
                    / c.denom().to_string().parse::<f64>().unwrap();
                c * k.to_string().parse::<f64>().unwrap().sqrt()
            })
            .sum();
        prop_assert!(close(surd_to_float(&a), per_term, 1e-12));
    }

    #[test]
    fn exact_equality_matches_float_sanity(a in surd_value(), b in surd_value()) {
        let diff = surd_to_float(&(&a - &b)).abs();
        if surd_eq(&a, &b) {
            prop_assert!(diff < 1e-9);
        }
        prop_assert!(surd_eq(&a, &a.clone()));
        // the surd ring is an integral domain; a nonzero difference of these
        // small values stays well away from zero
        if !surd_eq(&a, &b) {
            prop_assert!(diff > 1e-9);
        }
    }

    #[test]
    fn text_round_trip(a in surd_value()) {
        let text = a.to_string();
        let back: SurdSum = text.parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn products_of_square_roots(m in 1u64..5000, n in 1u64..5000) {
        let lhs = surd_mul(&SurdSum::sqrt_of(m), &SurdSum::sqrt_of(n));
        prop_assert_eq!(lhs, SurdSum::sqrt_of(m * n));
    }

    #[test]
    fn halfint_text_round_trip(twice in -400i32..400) {
        let h = HalfInt::from_twice(twice);
        let back: HalfInt = h.to_string().parse().unwrap();
        prop_assert_eq!(back, h);
        prop_assert_eq!((h + h - h).twice(), twice);
        prop_assert_eq!(h.is_integer(), twice % 2 == 0);
    }

    #[test]
    fn factorial_recurrence(n in 1u64..300) {
        let prev = factorial_factored(n - 1).unwrap();
        let cur = factorial_factored(n).unwrap();
        let (num, den) = (&cur / &prev).num_den();
        prop_assert_eq!(num, n.into());
        prop_assert_eq!(den, 1u32.into());
    }
}
