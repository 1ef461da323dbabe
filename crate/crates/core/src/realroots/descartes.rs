//! Descartes-rule bisection (Vincent–Collins–Akritas) for positive roots of a
//! square-free integer polynomial.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::intpoly::IntPoly;

pub(crate) enum Outcome {
    /// Open intervals `(lo, hi)`, each holding exactly one root; the
    /// endpoints are not roots.
    Isolated(Vec<(BigRational, BigRational)>),
    /// An exact rational root was hit on a bisection point.
    RationalRoot(BigRational),
}

/// Upper bound on the number of roots of `q` in `(0, 1)`.
fn unit_variations(q: &IntPoly) -> usize {
    let mut t = q.reverse();
    t.taylor_shift_one();
    t.sign_variations()
}

fn dyadic(num: &BigInt, log2den: i64) -> BigRational {
    if log2den >= 0 {
        BigRational::new(num.clone(), BigInt::one() << log2den as usize)
    } else {
        BigRational::from_integer(num << (-log2den) as usize)
    }
}

/// Isolates the roots of `p` in `(0, ∞)`. Requires `p` square-free with
/// `p(0) != 0`.
pub(crate) fn positive_roots(p: &IntPoly) -> Outcome {
    debug_assert!(!p.coeffs()[0].is_zero());
    if p.sign_variations() == 0 {
        return Outcome::Isolated(Vec::new());
    }
    let k = p.root_bound_exponent().max(0);
    let q0 = p.double_argument(k as usize);
    // Node (q, c, depth) stands for x in (c/2^depth, (c+1)/2^depth) * 2^k,
    // with q(y) proportional to p(2^k (c + y) / 2^depth) on y in (0, 1).
    let mut stack = vec![(q0, BigInt::zero(), 0i64)];
    let mut found = Vec::new();
    while let Some((q, c, depth)) = stack.pop() {
        let v = unit_variations(&q);
        if v == 0 {
            continue;
        }
        let lo = dyadic(&c, depth - k);
        if v == 1 {
            let hi = dyadic(&(&c + 1), depth - k);
            found.push((lo, hi));
            continue;
        }
        let left = q.halve_argument(1);
        let mut right = left.clone();
        right.taylor_shift_one();
        if right.coeffs()[0].is_zero() {
            let mid = dyadic(&(2 * &c + 1), depth + 1 - k);
            return Outcome::RationalRoot(mid);
        }
        let left = left.primitive();
        let right = right.primitive();
        stack.push((right, 2 * &c + 1, depth + 1));
        stack.push((left, 2 * &c, depth + 1));
    }
    found.sort();
    Outcome::Isolated(found)
}
