//! Closed intervals with rational endpoints and outward rounding, including
//! rigorous enclosures of natural logarithms.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rational::{ceil, floor, to_f64};
use crate::{Error, Result};

/// Default working precision in bits: enclosures are about `2^-192` wide.
pub const DEFAULT_BITS: u32 = 192;

#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", to_f64(&self.lo), to_f64(&self.hi))
    }
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Self { lo, hi }
    }

    pub fn point(v: BigRational) -> Self {
        Self {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::point(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        to_f64(&((&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))))
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-&self.hi, -&self.lo)
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let products = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        Interval::new(lo, hi)
    }

    pub fn div(&self, o: &Interval) -> Result<Interval> {
        if o.contains(&BigRational::zero()) {
            return Err(Error::Domain("interval division by an interval containing 0".into()));
        }
        let inv = Interval::new(o.hi.recip(), o.lo.recip());
        Ok(self.mul(&inv))
    }

    /// Rounds `lo` down and `hi` up to multiples of `2^-bits`.
    pub fn round_outward(&self, bits: u32) -> Interval {
        let scale = BigRational::from_integer(BigInt::one() << bits as usize);
        let lo = BigRational::new(floor(&(&self.lo * &scale)), scale.numer().clone());
        let hi = BigRational::new(ceil(&(&self.hi * &scale)), scale.numer().clone());
        Interval::new(lo, hi)
    }

    /// Enclosure of `ln` over the interval; requires `lo > 0`.
    pub fn ln(&self, bits: u32) -> Result<Interval> {
        if !self.lo.is_positive() {
            return Err(Error::Domain(format!(
                "logarithm of an interval reaching {:e}",
                to_f64(&self.lo)
            )));
        }
        let (lo, _) = ln_bounds(&self.lo, bits);
        let (_, hi) = ln_bounds(&self.hi, bits);
        Ok(Interval::new(lo, hi))
    }
}

/// Bounds `lo <= 2 atanh(t) <= hi` for rational `0 <= t <= 1/3`, to within
/// `2^-bits`.
fn two_atanh_bounds(t: &BigRational, bits: u32) -> (BigRational, BigRational) {
    debug_assert!(!t.is_negative() && *t <= BigRational::new(BigInt::one(), BigInt::from(3)));
    // Integer fixed point with scale 2^w; every quantity carries a floored
    // and a ceiled copy.
    let w = bits as usize + 16;
    let scale = BigRational::from_integer(BigInt::one() << w);
    let t2 = t * t;
    let (t2_lo, t2_hi) = (floor(&(&t2 * &scale)), ceil(&(&t2 * &scale)));
    let (mut p_lo, mut p_hi) = (floor(&(t * &scale)), ceil(&(t * &scale)));
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let one = BigInt::one();
    let mask = (&one << w) - &one;
    let ceil_shift = |v: BigInt| -> BigInt {
        let exact = (&v & &mask).is_zero();
        let q = v >> w;
        if exact { q } else { q + 1 }
    };
    let ceil_div = |a: &BigInt, b: u64| -> BigInt { (a + BigInt::from(b - 1)) / BigInt::from(b) };
    let stop = &one << 12usize;
    let mut j: u64 = 0;
    loop {
        lo += &p_lo / BigInt::from(2 * j + 1);
        hi += ceil_div(&p_hi, 2 * j + 1);
        p_lo = (&p_lo * &t2_lo) >> w;
        p_hi = ceil_shift(&p_hi * &t2_hi);
        // Remaining terms are bounded by t^{2j+3} / ((2j+3)(1 - t^2)), and
        // 1 - t^2 >= 8/9.
        let tail = ceil_div(&(&p_hi * 9u32), 8 * (2 * j + 3));
        if tail < stop || p_hi.is_zero() {
            let two = BigRational::from_integer(BigInt::from(2));
            let den = scale.numer().clone();
            return (
                BigRational::new(lo, den.clone()) * &two,
                BigRational::new(hi + tail, den) * two,
            );
        }
        j += 1;
    }
}

/// Rigorous bounds on `ln(q)` for a positive rational, about `2^-bits` wide.
pub fn ln_bounds(q: &BigRational, bits: u32) -> (BigRational, BigRational) {
    assert!(q.is_positive(), "ln of a non-positive rational");
    let work = bits + 16;
    // q = m * 2^k with 1 <= m < 2.
    let mut k = q.numer().bits() as i64 - q.denom().bits() as i64;
    let pow2 = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(BigInt::one() << e as usize)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
        }
    };
    let mut m = q / pow2(k);
    let two = BigRational::from_integer(BigInt::from(2));
    while m < BigRational::one() {
        m *= &two;
        k -= 1;
    }
    while m >= two {
        m /= &two;
        k += 1;
    }
    // Dyadic enclosure of m keeps the series rationals small.
    let grid = Interval::point(m).round_outward(work);
    let t_of = |v: &BigRational| (v - BigRational::one()) / (v + BigRational::one());
    let (m_lo, _) = two_atanh_bounds(&t_of(grid.lo()), work);
    let (_, m_hi) = two_atanh_bounds(&t_of(grid.hi()), work);
    let (ln2_lo, ln2_hi) = two_atanh_bounds(&BigRational::new(BigInt::one(), BigInt::from(3)), work);
    let kq = BigRational::from_integer(BigInt::from(k));
    let (klo, khi) = if k >= 0 {
        (&kq * &ln2_lo, &kq * &ln2_hi)
    } else {
        (&kq * &ln2_hi, &kq * &ln2_lo)
    };
    let out = Interval::new(klo + m_lo, khi + m_hi).round_outward(work);
    (out.lo, out.hi)
}
