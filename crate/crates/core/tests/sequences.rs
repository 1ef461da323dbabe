use num_rational::BigRational;
use proptest::prelude::*;

use turanlab::arith::ArithFn;
use turanlab::genpoly::{
    build_sequence, composition_oracle, exp_series_oracle, top_coefficient_closed_form, values_at,
    ValueSequence,
};
use turanlab::rational::{int, ratio};
use turanlab::turan::{d_coefficients_check, exceptions, low_delta_formula_check};

fn families() -> Vec<ArithFn> {
    vec![ArithFn::sigma(1), ArithFn::sigma(2), ArithFn::identity(), ArithFn::psi(3)]
}

#[test]
fn composition_oracle_agrees_with_recurrence() {
    for g in families() {
        let seq = build_sequence(&g, 10).unwrap();
        for x in [ratio(1, 2), int(1), int(3)] {
            for n in 0..=10 {
                assert_eq!(composition_oracle(&g, n, &x).unwrap(), seq.eval(n, &x).unwrap(), "{} n={n}", g.label());
            }
        }
    }
}

#[test]
fn exp_series_agrees_with_recurrence_to_order_30() {
    for g in families() {
        assert_eq!(exp_series_oracle(&g, 30).unwrap(), build_sequence(&g, 30).unwrap().polys());
    }
}

#[test]
fn closed_forms_for_low_coefficients() {
    let values = (1..=40).map(|k| if k == 1 { int(1) } else { ratio(k * k + 1, 2 * k) }).collect();
    let fractional = ArithFn::table("frac", values).unwrap();
    for g in families().into_iter().chain([fractional]) {
        assert!(low_delta_formula_check(&g).unwrap(), "{}", g.label());
        let seq = build_sequence(&g, 31).unwrap();
        let (g2, g3, g4) = (g.value(2).unwrap(), g.value(3).unwrap(), g.value(4).unwrap());
        for n in 1..=30u64 {
            let p = seq.get(n).unwrap();
            for m in 0..=3.min(n) {
                let expected = top_coefficient_closed_form(&g2, &g3, &g4, n, m).unwrap();
                assert_eq!(p.coeff((n - m) as usize), expected, "{} A_({n},{})", g.label(), n - m);
            }
            if n >= 2 {
                assert!(d_coefficients_check(&seq, n).unwrap(), "{} n={n}", g.label());
            }
        }
    }
}

#[test]
fn partition_and_plane_partition_values() {
    let p = values_at(&ArithFn::sigma(1), &int(1), 10).unwrap();
    let expected = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
    assert_eq!(p, expected.iter().map(|&v| int(v)).collect::<Vec<_>>());
    let pp = values_at(&ArithFn::sigma(2), &int(1), 6).unwrap();
    assert_eq!(pp, [1, 1, 3, 6, 13, 24, 48].iter().map(|&v| int(v)).collect::<Vec<_>>());
}

#[test]
fn known_exception_sets() {
    let odd: Vec<u64> = (0..=12).map(|k| 2 * k + 1).collect();
    assert_eq!(exceptions(&ArithFn::sigma(1), &int(1), 300).unwrap().exceptions, odd);
    assert_eq!(exceptions(&ArithFn::sigma(2), &int(1), 300).unwrap().exceptions, vec![1, 3, 5, 7, 9, 11]);
    assert_eq!(exceptions(&ArithFn::psi(9), &int(1), 200).unwrap().exceptions, vec![1, 4, 8]);
    assert_eq!(exceptions(&ArithFn::identity(), &int(1), 200).unwrap().exceptions, vec![1]);
}

#[test]
fn value_snapshot_round_trip() {
    let g = ArithFn::sigma(3);
    let mut v = ValueSequence::for_function(&g, &ratio(-2, 3)).unwrap();
    v.extend_to(&g.prefix(40).unwrap(), 40).unwrap();
    let json = serde_json::to_string(&v.snapshot()).unwrap();
    let back = ValueSequence::restore(&serde_json::from_str(&json).unwrap()).unwrap();
    assert_eq!(back.values(), v.values());
}

fn small_table() -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-9i64..10, 1i64..5), 11).prop_map(|v| {
        std::iter::once(int(1))
            .chain(v.into_iter().map(|(p, q)| ratio(p, q)))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn value_mode_matches_polynomial_evaluation(t in small_table(), p in -7i64..8, q in 1i64..6) {
        let g = ArithFn::table("t", t).unwrap();
        let x = ratio(p, q);
        let seq = build_sequence(&g, 12).unwrap();
        let vals = values_at(&g, &x, 12).unwrap();
        for n in 0..=12u64 {
            prop_assert_eq!(&vals[n as usize], &seq.eval(n, &x).unwrap());
        }
        let mut v = ValueSequence::for_function(&g, &x).unwrap();
        v.extend_to(&g.prefix(12).unwrap(), 12).unwrap();
        for n in 1..12u64 {
            let pn = seq.eval(n, &x).unwrap();
            let d = &pn * &pn - seq.eval(n - 1, &x).unwrap() * seq.eval(n + 1, &x).unwrap();
            prop_assert_eq!(v.delta_sign(n).unwrap(), turanlab::genpoly::Sign::of(&d));
        }
    }

    #[test]
    fn leading_coefficients_are_reciprocal_factorials(t in small_table()) {
        let g = ArithFn::table("t", t).unwrap();
        let seq = build_sequence(&g, 10).unwrap();
        for n in 0..=10u64 {
            let expected = BigRational::new(1.into(), turanlab::rational::factorial(n));
            prop_assert_eq!(seq.get(n).unwrap().coeff(n as usize), expected);
        }
    }
}
