//! Sturm sequences over primitive integer polynomials.

use num_bigint::Sign;
use num_rational::BigRational;

use super::intpoly::IntPoly;

#[derive(Debug, Clone)]
pub struct SturmSequence {
    chain: Vec<IntPoly>,
}

impl SturmSequence {
    pub fn new(p: &IntPoly) -> Self {
        let mut chain = vec![p.clone()];
        let d = p.derivative().primitive();
        if d.is_zero() {
            return Self { chain };
        }
        chain.push(d);
        loop {
            let n = chain.len();
            let r = chain[n - 2].signed_pseudo_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.neg());
        }
        Self { chain }
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    fn variations<I: Iterator<Item = Sign>>(signs: I) -> usize {
        let mut last = Sign::NoSign;
        let mut count = 0;
        for s in signs {
            if s == Sign::NoSign {
                continue;
            }
            if last != Sign::NoSign && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn variations_at(&self, x: &BigRational) -> usize {
        Self::variations(self.chain.iter().map(|p| p.sign_at(x)))
    }

    pub fn variations_at_infinity(&self, plus: bool) -> usize {
        Self::variations(self.chain.iter().map(|p| p.sign_at_infinity(plus)))
    }

    /// Distinct real roots of the first polynomial.
    pub fn count_all(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }

    /// Distinct roots in `(a, b]`, for `a` not a root and `a < b`.
    pub fn count_in(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations_at(a) - self.variations_at(b)
    }
}
