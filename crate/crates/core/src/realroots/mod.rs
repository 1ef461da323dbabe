//! Exact real-root isolation, nonnegativity certificates on the real line,
//! and numerical complex roots labelled by the exact real-root count.

pub mod complex;
mod descartes;
pub mod intpoly;
pub mod sturm;

use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::exactpoly::RationalPoly;
use crate::rational::{format_rational, to_f64};
use crate::{Error, Result};

pub use complex::{complex_roots, ComplexRootApprox, RootPicture};
pub use intpoly::{squarefree_decomposition, IntPoly};
pub use sturm::SturmSequence;

/// Above this degree the automatic method switches from Sturm bisection to
/// Descartes bisection.
pub const STURM_MAX_DEGREE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IsolationMethod {
    #[default]
    Auto,
    Sturm,
    Descartes,
}

/// A real root: exactly `lo` when `lo == hi`, otherwise the only root in the
/// open interval `(lo, hi)`, whose endpoints are not roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootEnclosure {
    pub lo: BigRational,
    pub hi: BigRational,
    pub multiplicity: u32,
}

impl RootEnclosure {
    fn exact(r: BigRational, multiplicity: u32) -> Self {
        Self {
            lo: r.clone(),
            hi: r,
            multiplicity,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.midpoint())
    }

    /// True when the root is certainly positive.
    pub fn is_positive(&self) -> bool {
        if self.is_exact() {
            self.lo.is_positive()
        } else {
            !self.lo.is_negative()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnclosureRecord {
    pub lo: String,
    pub hi: String,
    pub multiplicity: u32,
    pub approx: f64,
}

impl From<&RootEnclosure> for EnclosureRecord {
    fn from(e: &RootEnclosure) -> Self {
        Self {
            lo: format_rational(&e.lo),
            hi: format_rational(&e.hi),
            multiplicity: e.multiplicity,
            approx: e.to_f64(),
        }
    }
}

/// An enclosure together with a square-free polynomial that has exactly
/// one root in it. After exact roots are divided out this is the deflated
/// factor, which no longer vanishes at those roots.
#[derive(Debug, Clone)]
struct Tracked {
    enc: RootEnclosure,
    poly: Arc<IntPoly>,
}

fn bisect_once(f: &IntPoly, enc: &RootEnclosure) -> RootEnclosure {
    if enc.is_exact() {
        return enc.clone();
    }
    let mid = enc.midpoint();
    let s_mid = f.sign_at(&mid);
    if s_mid == Sign::NoSign {
        return RootEnclosure::exact(mid, enc.multiplicity);
    }
    if s_mid == f.sign_at(&enc.lo) {
        RootEnclosure {
            lo: mid,
            hi: enc.hi.clone(),
            multiplicity: enc.multiplicity,
        }
    } else {
        RootEnclosure {
            lo: enc.lo.clone(),
            hi: mid,
            multiplicity: enc.multiplicity,
        }
    }
}

fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

enum Step {
    Done(Vec<RootEnclosure>),
    Rational(BigRational),
}

fn sturm_step(f: &IntPoly) -> Step {
    let chain = SturmSequence::new(f);
    let b = pow2(f.root_bound_exponent());
    let a = -b.clone();
    let va = chain.variations_at(&a);
    let vb = chain.variations_at(&b);
    let mut stack = vec![(a, va, b, vb)];
    let mut out = Vec::new();
    while let Some((a, va, b, vb)) = stack.pop() {
        let count = va - vb;
        if count == 0 {
            continue;
        }
        if count == 1 {
            out.push(RootEnclosure {
                lo: a,
                hi: b,
                multiplicity: 1,
            });
            continue;
        }
        let mid = (&a + &b) / BigRational::from_integer(BigInt::from(2));
        if f.sign_at(&mid) == Sign::NoSign {
            return Step::Rational(mid);
        }
        let vm = chain.variations_at(&mid);
        stack.push((mid.clone(), vm, b, vb));
        stack.push((a, va, mid, vm));
    }
    Step::Done(out)
}

fn descartes_step(f: &IntPoly) -> Step {
    let mut out = Vec::new();
    match descartes::positive_roots(&f.reflect()) {
        descartes::Outcome::RationalRoot(r) => return Step::Rational(-r),
        descartes::Outcome::Isolated(v) => {
            for (lo, hi) in v.into_iter().rev() {
                out.push(RootEnclosure {
                    lo: -hi,
                    hi: -lo,
                    multiplicity: 1,
                });
            }
        }
    }
    match descartes::positive_roots(f) {
        descartes::Outcome::RationalRoot(r) => return Step::Rational(r),
        descartes::Outcome::Isolated(v) => {
            out.extend(v.into_iter().map(|(lo, hi)| RootEnclosure {
                lo,
                hi,
                multiplicity: 1,
            }));
        }
    }
    Step::Done(out)
}

/// Isolates the real roots of a square-free integer polynomial. Exact
/// rational roots found on the way are divided out and reported exactly;
/// every interval comes with the deflated polynomial it was isolated for.
fn isolate_squarefree(f: &IntPoly, method: IsolationMethod) -> Vec<(RootEnclosure, Arc<IntPoly>)> {
    let mut f = f.clone();
    let mut exact = Vec::new();
    if f.degree().unwrap_or(0) >= 1 && f.coeffs()[0].is_zero() {
        exact.push(BigRational::zero());
        f = IntPoly::new(f.coeffs()[1..].to_vec());
    }
    let mut intervals = Vec::new();
    loop {
        match f.degree() {
            None | Some(0) => break,
            Some(1) => {
                exact.push(BigRational::new(-f.coeffs()[0].clone(), f.coeffs()[1].clone()));
                break;
            }
            Some(_) => {}
        }
        let use_sturm = match method {
            IsolationMethod::Sturm => true,
            IsolationMethod::Descartes => false,
            IsolationMethod::Auto => f.degree().unwrap() <= STURM_MAX_DEGREE,
        };
        let step = if use_sturm {
            sturm_step(&f)
        } else {
            descartes_step(&f)
        };
        match step {
            Step::Rational(r) => {
                f = f.deflate(&r);
                exact.push(r);
            }
            Step::Done(v) => {
                intervals = v;
                break;
            }
        }
    }
    let poly = Arc::new(f);
    let mut out: Vec<(RootEnclosure, Arc<IntPoly>)> =
        intervals.into_iter().map(|e| (e, poly.clone())).collect();
    // Deflated roots may sit inside the intervals; separation handles that.
    let linear = |r: &BigRational| Arc::new(IntPoly::new(vec![-r.numer().clone(), r.denom().clone()]));
    out.extend(exact.into_iter().map(|r| (RootEnclosure::exact(r.clone(), 1), linear(&r))));
    out
}

fn closed_overlap(a: &RootEnclosure, b: &RootEnclosure) -> bool {
    a.lo <= b.hi && b.lo <= a.hi
}

/// Square-free factors of `p` with multiplicities, the power of `x` split off
/// first so the common case stays on the modular fast path.
fn factor_squarefree(p: &RationalPoly) -> Vec<(IntPoly, u32)> {
    let v = p.x_valuation().unwrap_or(0);
    let stripped = p.shift_down(v).expect("valuation divides");
    let mut factors = squarefree_decomposition(&IntPoly::from_rational(&stripped));
    if v > 0 {
        factors.push((IntPoly::new(vec![BigInt::zero(), BigInt::one()]), v as u32));
    }
    factors
}

fn isolate_tracked(p: &RationalPoly, method: IsolationMethod) -> Result<Vec<Tracked>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let factors = factor_squarefree(p);
    let mut roots = Vec::new();
    for (f, m) in &factors {
        for (mut enc, poly) in isolate_squarefree(f, method) {
            enc.multiplicity = *m;
            roots.push(Tracked { enc, poly });
        }
    }
    // Separate enclosures of different factors until the closed intervals
    // are pairwise disjoint.
    loop {
        roots.sort_by(|a, b| a.enc.lo.cmp(&b.enc.lo).then(a.enc.hi.cmp(&b.enc.hi)));
        let clash = roots
            .windows(2)
            .position(|w| closed_overlap(&w[0].enc, &w[1].enc));
        let Some(i) = clash else { break };
        let pick = if roots[i].enc.width() >= roots[i + 1].enc.width() {
            i
        } else {
            i + 1
        };
        let t = &roots[pick];
        if t.enc.is_exact() {
            return Err(Error::Internal("two exact enclosures of one root".into()));
        }
        roots[pick].enc = bisect_once(&t.poly, &t.enc);
    }
    Ok(roots)
}

/// Distinct real roots of `p`, in increasing order, with multiplicities.
pub fn isolate_real_roots(p: &RationalPoly) -> Result<Vec<RootEnclosure>> {
    isolate_real_roots_with(p, IsolationMethod::Auto)
}

pub fn isolate_real_roots_with(
    p: &RationalPoly,
    method: IsolationMethod,
) -> Result<Vec<RootEnclosure>> {
    Ok(isolate_tracked(p, method)?
        .into_iter()
        .map(|t| t.enc)
        .collect())
}

/// Like [`isolate_real_roots`], with every enclosure narrowed to at most
/// `width`.
pub fn isolate_real_roots_refined(
    p: &RationalPoly,
    width: &BigRational,
) -> Result<Vec<RootEnclosure>> {
    if !width.is_positive() {
        return Err(Error::InvalidArgument("refinement width must be positive".into()));
    }
    let iso = isolate_tracked(p, IsolationMethod::Auto)?;
    Ok(iso
        .into_iter()
        .map(|t| {
            let mut e = t.enc;
            while e.width() > *width {
                e = bisect_once(&t.poly, &e);
            }
            e
        })
        .collect())
}

/// Number of distinct real roots of `p` in `(a, b]`.
pub fn count_roots_in(p: &RationalPoly, a: &BigRational, b: &BigRational) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if a >= b {
        return Ok(0);
    }
    let mut total = 0;
    for (f, _) in factor_squarefree(p) {
        let mut f = f;
        let mut extra = 0;
        // Sturm counts need a left endpoint that is not a root.
        if f.sign_at(a) == Sign::NoSign {
            let linear = RationalPoly::from_coeffs(vec![-a.clone(), BigRational::one()]);
            f = IntPoly::from_rational(&f.to_rational().div_rem(&linear)?.0);
        }
        if f.degree().unwrap_or(0) > 0 {
            extra = SturmSequence::new(&f).count_in(a, b);
        }
        total += extra;
    }
    Ok(total)
}

/// Exact decision of `p(x) >= 0` for all real `x`.
#[derive(Debug, Clone)]
pub struct NonnegCertificate {
    pub nonnegative: bool,
    pub degree: usize,
    /// Real roots of odd multiplicity; empty exactly when nonnegative (for a
    /// positive leading coefficient and even degree).
    pub odd_roots: Vec<RootEnclosure>,
    /// A rational point where `p < 0`, when one exists.
    pub witness: Option<BigRational>,
}

pub fn nonnegativity(p: &RationalPoly) -> Result<NonnegCertificate> {
    let Some(degree) = p.degree() else {
        return Ok(NonnegCertificate {
            nonnegative: true,
            degree: 0,
            odd_roots: Vec::new(),
            witness: None,
        });
    };
    let ip = IntPoly::from_rational(p);
    let far = pow2(ip.root_bound_exponent());
    if p.leading().is_some_and(|c| c.is_negative()) {
        return Ok(NonnegCertificate {
            nonnegative: false,
            degree,
            odd_roots: Vec::new(),
            witness: Some(far),
        });
    }
    if degree % 2 == 1 {
        return Ok(NonnegCertificate {
            nonnegative: false,
            degree,
            odd_roots: Vec::new(),
            witness: Some(-far),
        });
    }
    let iso = isolate_tracked(p, IsolationMethod::Auto)?;
    let all: Vec<RootEnclosure> = iso.iter().map(|t| t.enc.clone()).collect();
    let odd: Vec<RootEnclosure> = all
        .iter()
        .filter(|e| e.multiplicity % 2 == 1)
        .cloned()
        .collect();
    let witness = odd.first().map(|e| find_negative_point(p, e, &all)).transpose()?;
    Ok(NonnegCertificate {
        nonnegative: odd.is_empty(),
        degree,
        odd_roots: odd,
        witness,
    })
}

/// A point near an odd-multiplicity root where `p` is negative.
fn find_negative_point(
    p: &RationalPoly,
    e: &RootEnclosure,
    all: &[RootEnclosure],
) -> Result<BigRational> {
    let (a, b) = if e.is_exact() {
        let mut gap: Option<BigRational> = None;
        for o in all {
            if o == e {
                continue;
            }
            let d = if o.hi < e.lo { &e.lo - &o.hi } else { &o.lo - &e.hi };
            gap = Some(match gap {
                Some(g) if g <= d => g,
                _ => d,
            });
        }
        let delta = gap.unwrap_or_else(BigRational::one) / BigRational::from_integer(BigInt::from(2));
        (&e.lo - &delta, &e.hi + &delta)
    } else {
        (e.lo.clone(), e.hi.clone())
    };
    for x in [a, b] {
        if p.eval(&x).is_negative() {
            return Ok(x);
        }
    }
    Err(Error::Internal("no sign change around an odd-multiplicity root".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn from_roots(roots: &[(i64, i64)]) -> RationalPoly {
        roots.iter().fold(RationalPoly::one(), |acc, &(p, q)| {
            acc * RationalPoly::from_coeffs(vec![-ratio(p, q), int(1)])
        })
    }

    fn check_isolation(p: &RationalPoly, expected: &[f64]) {
        for method in [
            IsolationMethod::Sturm,
            IsolationMethod::Descartes,
            IsolationMethod::Auto,
        ] {
            let roots = isolate_real_roots_with(p, method).unwrap();
            assert_eq!(roots.len(), expected.len(), "{method:?}");
            for (r, &x) in roots.iter().zip(expected) {
                let lo = to_f64(&r.lo);
                let hi = to_f64(&r.hi);
                assert!(lo <= x && x <= hi, "{method:?}: {x} not in [{lo}, {hi}]");
                if !r.is_exact() {
                    assert!(!p.eval(&r.lo).is_zero());
                    assert!(!p.eval(&r.hi).is_zero());
                }
            }
        }
    }

    #[test]
    fn isolates_irrational_roots() {
        // x^2 - 2
        let p = RationalPoly::from_ints(&[-2, 0, 1]);
        check_isolation(&p, &[-std::f64::consts::SQRT_2, std::f64::consts::SQRT_2]);
    }

    #[test]
    fn rational_roots_on_bisection_points_are_exact() {
        let p = from_roots(&[(1, 2), (-3, 1), (7, 4), (0, 1)]);
        check_isolation(&p, &[-3.0, 0.0, 0.5, 1.75]);
        for method in [IsolationMethod::Sturm, IsolationMethod::Descartes] {
            let roots = isolate_real_roots_with(&p, method).unwrap();
            assert!(roots[1].is_exact() && roots[1].lo.is_zero(), "{method:?}");
            for r in roots.iter().filter(|r| r.is_exact()) {
                assert!(p.eval(&r.lo).is_zero());
            }
        }
    }

    #[test]
    fn close_roots_are_separated() {
        // (x - 1/1000)(x - 1/1001)(x^2 - 3)
        let p = from_roots(&[(1, 1000), (1, 1001)]) * RationalPoly::from_ints(&[-3, 0, 1]);
        check_isolation(&p, &[-(3f64.sqrt()), 1.0 / 1001.0, 1.0 / 1000.0, 3f64.sqrt()]);
    }

    #[test]
    fn multiplicities_are_reported() {
        let p = from_roots(&[(1, 1), (1, 1), (1, 1), (-2, 1)]) * RationalPoly::from_ints(&[-5, 0, 1]).pow(2);
        let roots = isolate_real_roots(&p).unwrap();
        let m: Vec<u32> = roots.iter().map(|r| r.multiplicity).collect();
        assert_eq!(m, vec![2, 1, 3, 2]);
    }

    #[test]
    fn wilkinson_like_degree_thirty() {
        let roots: Vec<(i64, i64)> = (1..=30).map(|k| (k, 3)).collect();
        let p = from_roots(&roots) + RationalPoly::constant(ratio(1, 1_000_000_007));
        let sturm = isolate_real_roots_with(&p, IsolationMethod::Sturm).unwrap();
        let desc = isolate_real_roots_with(&p, IsolationMethod::Descartes).unwrap();
        assert_eq!(sturm.len(), desc.len());
        for (a, b) in sturm.iter().zip(&desc) {
            assert!(closed_overlap(a, b));
        }
    }

    #[test]
    fn refinement_narrows() {
        let p = RationalPoly::from_ints(&[-2, 0, 1]);
        let w = ratio(1, 1 << 40);
        let roots = isolate_real_roots_refined(&p, &w).unwrap();
        assert!((roots[1].to_f64() - std::f64::consts::SQRT_2).abs() < 1e-11);
    }

    #[test]
    fn counting_in_windows() {
        let p = from_roots(&[(1, 1), (2, 1), (3, 1)]);
        assert_eq!(count_roots_in(&p, &int(1), &int(3)).unwrap(), 2);
        assert_eq!(count_roots_in(&p, &int(0), &int(3)).unwrap(), 3);
        assert_eq!(count_roots_in(&p, &ratio(3, 2), &ratio(5, 2)).unwrap(), 1);
    }

    #[test]
    fn nonnegativity_decisions() {
        // (x^2 - 1)^2 + 0: nonnegative with double roots.
        let sq = RationalPoly::from_ints(&[-1, 0, 1]).pow(2);
        let c = nonnegativity(&sq).unwrap();
        assert!(c.nonnegative && c.witness.is_none());
        // x^4 - x^2 + 1/8 dips below zero.
        let dip = RationalPoly::from_coeffs(vec![ratio(1, 8), int(0), int(-1), int(0), int(1)]);
        let c = nonnegativity(&dip).unwrap();
        assert!(!c.nonnegative);
        assert!(dip.eval(c.witness.as_ref().unwrap()).is_negative());
        // x^3 (x - 1)... odd degree
        let odd = RationalPoly::from_ints(&[0, 0, 0, 1]);
        let c = nonnegativity(&odd).unwrap();
        assert!(!c.nonnegative && odd.eval(c.witness.as_ref().unwrap()).is_negative());
        // x^3 (x - 1): triple root at 0.
        let t = RationalPoly::from_ints(&[0, 0, 0, -1, 1]);
        let c = nonnegativity(&t).unwrap();
        assert!(!c.nonnegative && t.eval(c.witness.as_ref().unwrap()).is_negative());
        // x^2 + 1
        assert!(nonnegativity(&RationalPoly::from_ints(&[1, 0, 1])).unwrap().nonnegative);
        // -x^2
        assert!(!nonnegativity(&RationalPoly::from_ints(&[0, 0, -1])).unwrap().nonnegative);
    }

    #[test]
    fn deflated_roots_next_to_bisection_points() {
        // A root on a bisection point is divided out; a neighbour isolated
        // afterwards must still be separated from it correctly.
        for k in -8i64..=8 {
            for q in [3i64, 7, 64, 1000] {
                let p = from_roots(&[(k, 2), (k * q + 2, 2 * q), (1, 3), (-5, 1)]);
                for method in [IsolationMethod::Sturm, IsolationMethod::Descartes] {
                    let roots = isolate_real_roots_with(&p, method).unwrap();
                    let mut expected = vec![ratio(k, 2), ratio(k * q + 2, 2 * q), ratio(1, 3), int(-5)];
                    expected.sort();
                    expected.dedup();
                    assert_eq!(roots.len(), expected.len(), "k={k} q={q}");
                    for w in roots.windows(2) {
                        assert!(w[0].hi < w[1].lo);
                    }
                    for (e, r) in roots.iter().zip(&expected) {
                        assert!(e.lo <= *r && *r <= e.hi, "k={k} q={q} root {r}");
                    }
                }
            }
        }
    }
}
