use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use turanlab::arith::ArithFn;
use turanlab::exactpoly::RationalPoly;
use turanlab::genpoly::build_sequence;
use turanlab::rational::{int, ratio};
use turanlab::realroots::{
    complex_roots, count_roots_in, isolate_real_roots, isolate_real_roots_refined, isolate_real_roots_with,
    nonnegativity, IsolationMethod,
};
use turanlab::turan::delta;

fn from_roots(roots: &[(BigRational, u32)], lead: i64) -> RationalPoly {
    let mut p = RationalPoly::constant(int(lead));
    for (r, m) in roots {
        let lin = RationalPoly::from_coeffs(vec![-r.clone(), int(1)]);
        p = &p * &lin.pow(*m);
    }
    p
}

#[test]
fn simple_examples() {
    let roots = isolate_real_roots(&RationalPoly::from_ints(&[-4, 0, 1])).unwrap();
    assert_eq!(roots.len(), 2);
    assert!(roots[0].lo < int(-2) || roots[0].hi >= int(-2));
    assert!(roots.iter().all(|r| r.multiplicity == 1));
    // Δ_1 for σ_1 is (x/2)(x - 3).
    let seq = build_sequence(&ArithFn::sigma(1), 2).unwrap();
    let d1 = delta(&seq, 1).unwrap().into_delta();
    let roots = isolate_real_roots_refined(&d1, &ratio(1, 1 << 20)).unwrap();
    assert_eq!(roots.len(), 2);
    assert!(roots[0].lo <= int(0) && int(0) <= roots[0].hi);
    assert!(roots[1].lo <= int(3) && int(3) <= roots[1].hi);
    assert!(isolate_real_roots(&RationalPoly::zero()).is_err());
}

#[test]
fn delta_has_double_root_at_zero() {
    let seq = build_sequence(&ArithFn::psi(2), 12).unwrap();
    for n in 2..=11 {
        let d = delta(&seq, n).unwrap().into_delta();
        assert!(d.x_valuation().unwrap() >= 2, "n = {n}");
        let zero = isolate_real_roots(&d).unwrap().into_iter().find(|r| r.is_exact() && r.lo.is_zero()).unwrap();
        assert!(zero.multiplicity >= 2);
    }
}

#[test]
fn nonnegativity_examples() {
    let x4 = RationalPoly::monomial(ratio(1, 12), 4);
    assert!(nonnegativity(&x4).unwrap().nonnegative);
    let seq = build_sequence(&ArithFn::identity(), 3).unwrap();
    let d1 = delta(&seq, 1).unwrap().into_delta();
    let cert = nonnegativity(&d1).unwrap();
    assert!(!cert.nonnegative);
    let w = cert.witness.unwrap();
    assert!(d1.eval(&w) < BigRational::zero());
    assert_eq!(delta(&seq, 2).unwrap().into_delta(), x4);
}

#[test]
fn root_counts_add_up_to_degree() {
    let seq = build_sequence(&ArithFn::psi(5), 16).unwrap();
    for n in 1..=15 {
        let d = delta(&seq, n).unwrap().into_delta();
        let pic = complex_roots(&d).unwrap();
        assert!(pic.certified, "n = {n}");
        let real: u32 = pic.roots.iter().filter(|r| r.is_real).map(|r| r.multiplicity).sum();
        let pairs = pic.roots.iter().filter(|r| !r.is_real).count() as u32;
        assert_eq!(real as usize + 2 * pairs as usize, d.degree().unwrap(), "n = {n}");
        assert!(pic.roots.iter().filter(|r| !r.is_real).all(|r| r.im > 0.0));
    }
}

#[test]
fn complex_roots_of_x2_plus_1() {
    let pic = complex_roots(&RationalPoly::from_ints(&[1, 0, 1])).unwrap();
    assert_eq!(pic.roots.len(), 1);
    let z = &pic.roots[0];
    assert!(!z.is_real && z.re.abs() < 1e-12 && (z.im - 1.0).abs() < 1e-12);
}

fn roots_strategy() -> impl Strategy<Value = Vec<(BigRational, u32)>> {
    prop::collection::btree_map((-40i64..40, 1i64..7), 1u32..4, 1..6).prop_map(|m| {
        let mut seen = Vec::new();
        let mut out = Vec::new();
        for ((p, q), mult) in m {
            let r = ratio(p, q);
            if !seen.contains(&r) {
                seen.push(r.clone());
                out.push((r, mult));
            }
        }
        out.sort();
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn isolation_recovers_roots_and_multiplicities(roots in roots_strategy(), lead in prop::sample::select(vec![-3i64, -1, 2, 5])) {
        let quad = RationalPoly::from_ints(&[2, 0, 1]);
        let p = &from_roots(&roots, lead) * &quad;
        for method in [IsolationMethod::Sturm, IsolationMethod::Descartes] {
            let found = isolate_real_roots_with(&p, method).unwrap();
            prop_assert_eq!(found.len(), roots.len());
            for (enc, (r, m)) in found.iter().zip(&roots) {
                prop_assert!(enc.lo <= *r && *r <= enc.hi);
                prop_assert_eq!(enc.multiplicity, *m);
            }
            for w in found.windows(2) {
                prop_assert!(w[0].hi < w[1].lo);
            }
        }
        let refined = isolate_real_roots_refined(&p, &ratio(1, 1000)).unwrap();
        prop_assert!(refined.iter().all(|e| e.width() <= ratio(1, 1000)));
    }

    #[test]
    fn sign_changes_only_inside_odd_enclosures(roots in roots_strategy()) {
        let p = from_roots(&roots, 1);
        let found = isolate_real_roots(&p).unwrap();
        let grid: Vec<BigRational> = (-90..=90).map(|k| ratio(k, 2)).collect();
        for w in grid.windows(2) {
            let (a, b) = (p.eval(&w[0]), p.eval(&w[1]));
            if (a < BigRational::zero()) != (b < BigRational::zero()) && !a.is_zero() && !b.is_zero() {
                prop_assert!(found.iter().any(|e| e.multiplicity % 2 == 1 && e.hi >= w[0] && e.lo <= w[1]));
            }
        }
        prop_assert_eq!(count_roots_in(&p, &int(-50), &int(50)).unwrap(), roots.len());
    }

    #[test]
    fn squares_are_nonnegative(roots in roots_strategy()) {
        let p = from_roots(&roots, 1);
        prop_assert!(nonnegativity(&(&p * &p)).unwrap().nonnegative);
        let odd = roots.iter().any(|(_, m)| m % 2 == 1);
        let cert = nonnegativity(&p).unwrap();
        if odd {
            prop_assert!(!cert.nonnegative);
            let w = cert.witness.unwrap();
            prop_assert!(p.eval(&w) < BigRational::zero());
        }
    }
}
