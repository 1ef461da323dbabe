use num_rational::BigRational;
use proptest::prelude::*;

use turanlab::arith::{ArithFn, DoubleSequence};
use turanlab::bounds::{d0, estimate_r, prop1_bounds, prop1_grid, validate_r, verify_thresholds, ResidueCase};
use turanlab::genpoly::Sign;
use turanlab::rational::{int, ratio, to_f64};
use turanlab::turan::sign_at_value_mode;

#[test]
fn sandwich_on_a_grid() {
    for seq in [DoubleSequence::sigma(), DoubleSequence::psi()] {
        let reports = prop1_grid(&seq, 4, 40, &[ratio(1, 2), int(1), int(2)]).unwrap();
        let bad: Vec<_> = reports.iter().filter(|r| !r.holds()).map(|r| (r.n, r.d, r.x.clone())).collect();
        assert!(bad.is_empty(), "{}: {bad:?}", seq.label());
    }
}

#[test]
fn single_bound_report() {
    let r = prop1_bounds(&DoubleSequence::sigma(), 7, 2, &int(1)).unwrap();
    // n = 7 ≡ 1: n' = 1, constant (4·3)^{d-1} = 12.
    assert_eq!(r.lower, "18");
    assert_eq!(r.upper, "180");
    assert!(r.holds());
    let r = prop1_bounds(&DoubleSequence::psi(), 8, 3, &int(1)).unwrap();
    assert!(r.improved_upper.is_some());
    assert!(r.holds());
}

#[test]
fn thresholds_in_each_residue_class() {
    let x = int(1);
    for (family, g1) in [(DoubleSequence::sigma(), ArithFn::sigma(1)), (DoubleSequence::psi(), ArithFn::identity())] {
        let est = estimate_r(&g1, &x, 30, &ratio(9, 10)).unwrap();
        for n in [3u64, 4, 6, 7, 11] {
            let rep = verify_thresholds(&family, n, &x, &est, 3, Some(1 << 30)).unwrap();
            assert!(rep.holds, "{} n={n}: {rep:?}", family.label());
            let expected = if n % 3 == 0 { Sign::Positive } else { Sign::Negative };
            assert!(rep.checks.iter().all(|c| c.sign == expected));
        }
    }
}

#[test]
fn threshold_domain_errors() {
    assert!(d0(5, &int(1), &ratio(1, 2)).is_err());
    assert!(d0(8, &ratio(3, 2), &ratio(1, 2)).is_err());
    assert!(d0(8, &ratio(1, 2), &ratio(1, 2)).is_ok());
    assert!(d0(11, &int(1), &ratio(1, 2)).is_ok());
    assert!(d0(4, &int(0), &ratio(1, 2)).is_err());
    assert!(d0(4, &int(1), &int(0)).is_err());
}

#[test]
fn worked_threshold() {
    let t = d0(9, &int(1), &ratio(1, 2)).unwrap();
    assert_eq!(t.case, ResidueCase::Zero);
    assert!((t.d0_f64() - 162.893_628_193_766).abs() < 1e-9);
    assert_eq!(t.threshold, 163);
    for d in 158..=168 {
        assert_eq!(sign_at_value_mode(&ArithFn::sigma(d), 9, &int(1)).unwrap(), Sign::Positive, "d = {d}");
    }
}

#[test]
fn radius_validation_limits() {
    assert_eq!(validate_r(&ArithFn::sigma(1), &int(1), &ratio(1, 2), 50).unwrap(), 50);
    assert_eq!(validate_r(&ArithFn::identity(), &int(1), &ratio(1, 3), 50).unwrap(), 50);
    let est = estimate_r(&ArithFn::sigma(1), &int(2), 40, &int(1)).unwrap();
    assert!(validate_r(&ArithFn::sigma(1), &int(2), &(est.r * ratio(11, 10)), 40).unwrap() < 40);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn d0_is_monotone_in_r(n in 3u64..40, a in 1i64..50, b in 1i64..50) {
        prop_assume!(n != 5 && a != b);
        let x = if n % 3 == 2 { ratio(1, 2) } else { int(1) };
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let small = d0(n, &x, &ratio(lo, 64)).unwrap();
        let large = d0(n, &x, &ratio(hi, 64)).unwrap();
        prop_assert!(small.d0.lo() > large.d0.hi());
        prop_assert!(small.threshold >= large.threshold);
    }

    #[test]
    fn d0_enclosure_contains_float_estimate(n in 3u64..60, r in 1i64..60) {
        prop_assume!(n != 5 && n % 3 != 2);
        let rr = ratio(r, 64);
        let t = d0(n, &int(1), &rr).unwrap();
        let m = if n % 3 == 0 { n as f64 / 3.0 } else { (n as f64 - 1.0) / 3.0 };
        let f = 1.0 + 2.0 * n as f64 / (3.0 * (9f64 / 8.0).ln()) * (m.ln() - 3.0 * to_f64(&rr).ln());
        prop_assert!((to_f64(t.d0.lo()) - f).abs() < 1e-9 * f.abs().max(1.0));
        prop_assert!(t.d0.lo() <= t.d0.hi());
        prop_assert!(BigRational::from_integer(t.threshold.into()) >= *t.d0.hi());
    }
}
