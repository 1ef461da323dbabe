//! Primitive integer polynomials: the working representation for root
//! isolation. Any rational polynomial is a positive rational multiple of a
//! unique primitive integer polynomial, so signs and roots carry over.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exactpoly::RationalPoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    pub(crate) c: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|v| v.is_zero()) {
            c.pop();
        }
        Self { c }
    }

    /// Primitive integer polynomial with the same sign pattern as `p`.
    pub fn from_rational(p: &RationalPoly) -> Self {
        let lcm = p
            .coeffs()
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let c = p
            .coeffs()
            .iter()
            .map(|v| v.numer() * (&lcm / v.denom()))
            .collect();
        Self::new(c).primitive()
    }

    pub fn to_rational(&self) -> RationalPoly {
        RationalPoly::from_coeffs(self.c.iter().cloned().map(BigRational::from_integer).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn leading(&self) -> &BigInt {
        self.c.last().expect("non-zero polynomial")
    }

    /// Positive gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        self.c
            .iter()
            .fold(BigInt::zero(), |acc, v| if acc.is_one() { acc } else { acc.gcd(v) })
    }

    /// Divides by the positive content; the sign pattern is unchanged.
    pub fn primitive(self) -> Self {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self;
        }
        Self {
            c: self.c.into_iter().map(|v| v / &g).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, v)| v * BigInt::from(k))
                .collect(),
        )
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> Self {
        Self {
            c: self
                .c
                .iter()
                .enumerate()
                .map(|(k, v)| if k % 2 == 1 { -v } else { v.clone() })
                .collect(),
        }
    }

    /// `x^d p(1/x)`.
    pub fn reverse(&self) -> Self {
        let mut c = self.c.clone();
        c.reverse();
        Self::new(c)
    }

    /// `p(x + 1)`, in place.
    pub fn taylor_shift_one(&mut self) {
        let n = self.c.len();
        for i in 0..n.saturating_sub(1) {
            for j in (i..n - 1).rev() {
                let next = self.c[j + 1].clone();
                self.c[j] += next;
            }
        }
    }

    /// `2^{k d} p(x / 2^k)`: coefficient `i` gains `2^{k(d - i)}`.
    pub fn halve_argument(&self, k: usize) -> Self {
        let d = self.c.len().saturating_sub(1);
        Self {
            c: self
                .c
                .iter()
                .enumerate()
                .map(|(i, v)| v << (k * (d - i)))
                .collect(),
        }
    }

    /// `p(2^k x)`.
    pub fn double_argument(&self, k: usize) -> Self {
        Self {
            c: self.c.iter().enumerate().map(|(i, v)| v << (k * i)).collect(),
        }
    }

    /// Sign changes in the coefficient sequence, zeros skipped.
    pub fn sign_variations(&self) -> usize {
        let mut last = Sign::NoSign;
        let mut count = 0;
        for v in &self.c {
            let s = v.sign();
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

    /// `b^d p(a/b)` for `b > 0`; has the sign of `p(a/b)`.
    pub fn eval_homogeneous(&self, a: &BigInt, b: &BigInt) -> BigInt {
        debug_assert!(b.is_positive());
        let mut it = self.c.iter().rev();
        let Some(first) = it.next() else {
            return BigInt::zero();
        };
        let mut acc = first.clone();
        let mut bpow = BigInt::one();
        for v in it {
            bpow *= b;
            acc = acc * a + v * &bpow;
        }
        acc
    }

    pub fn sign_at(&self, r: &BigRational) -> Sign {
        self.eval_homogeneous(r.numer(), r.denom()).sign()
    }

    /// Sign of `p(x)` as `x → +∞` (`at_plus = true`) or `x → -∞`.
    pub fn sign_at_infinity(&self, at_plus: bool) -> Sign {
        let s = self.leading().sign();
        if at_plus || self.c.len() % 2 == 1 {
            s
        } else {
            -s
        }
    }

    /// `k` with every complex root of modulus below `2^k` (Fujiwara's bound,
    /// evaluated on bit lengths).
    pub fn root_bound_exponent(&self) -> i64 {
        let d = self.c.len() - 1;
        if d == 0 {
            return 0;
        }
        let lead_bits = self.leading().bits() as i64;
        let mut best = i64::MIN;
        for i in 1..=d {
            let a = &self.c[d - i];
            if a.is_zero() {
                continue;
            }
            // |a / lead| < 2^{bits(a) - bits(lead) + 1}
            let e = a.bits() as i64 - lead_bits + 1;
            best = best.max(num_integer::Integer::div_ceil(&e, &(i as i64)));
        }
        if best == i64::MIN {
            0
        } else {
            best + 2
        }
    }

    /// Pseudo-remainder of `self` by `other`, rescaled by a positive factor
    /// so that it has the sign of the true remainder.
    pub fn signed_pseudo_rem(&self, other: &IntPoly) -> IntPoly {
        let db = other.degree().expect("non-zero divisor");
        let lead = other.leading().clone();
        let mut r = self.c.clone();
        if r.len() <= db {
            return self.clone();
        }
        let steps = r.len() - db;
        for i in (0..steps).rev() {
            let top = r[i + db].clone();
            if top.is_zero() {
                for v in r.iter_mut() {
                    *v *= &lead;
                }
                continue;
            }
            for v in r.iter_mut() {
                *v *= &lead;
            }
            for (j, bc) in other.c.iter().enumerate() {
                r[i + j] -= &top * bc;
            }
        }
        r.truncate(db);
        // r = lead^steps * (true remainder); undo the sign of lead^steps.
        let mut out = IntPoly::new(r).primitive();
        if lead.is_negative() && steps % 2 == 1 {
            out = out.neg();
        }
        out
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            c: self.c.iter().map(|v| -v).collect(),
        }
    }

    /// Exact quotient by `b x - a`, where `a/b` is a root.
    pub fn deflate(&self, root: &BigRational) -> IntPoly {
        let linear = RationalPoly::from_coeffs(vec![-root.clone(), BigRational::one()]);
        let (q, r) = self.to_rational().div_rem(&linear).expect("non-zero divisor");
        debug_assert!(r.is_zero(), "deflation by a non-root");
        IntPoly::from_rational(&q)
    }
}

const MODULUS: u64 = (1 << 61) - 1;

fn reduce(v: &BigInt) -> u64 {
    let m = BigInt::from(MODULUS);
    let r = v.mod_floor(&m);
    r.to_u64().expect("reduced residue fits")
}

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    acc
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Degree of `gcd(a mod P, b mod P)` over `F_P` with `P = 2^61 - 1`.
fn gcd_degree_mod_p(a: &IntPoly, b: &IntPoly) -> Option<usize> {
    let mut x: Vec<u64> = a.c.iter().map(reduce).collect();
    let mut y: Vec<u64> = b.c.iter().map(reduce).collect();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        // x <- x mod y
        let inv = powmod(*y.last().unwrap(), MODULUS - 2);
        while x.len() >= y.len() {
            let shift = x.len() - y.len();
            let f = mulmod(*x.last().unwrap(), inv);
            for (j, &yc) in y.iter().enumerate() {
                let t = mulmod(f, yc);
                x[shift + j] = (x[shift + j] + MODULUS - t) % MODULUS;
            }
            trim(&mut x);
            if x.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut x, &mut y);
    }
    x.len().checked_sub(1)
}

/// Certifies `gcd(p, p') = 1` over the rationals by a single modular gcd.
/// A `false` answer is inconclusive.
pub fn squarefree_certified_mod_p(p: &IntPoly) -> bool {
    if p.degree().unwrap_or(0) == 0 {
        return true;
    }
    if reduce(p.leading()) == 0 {
        return false;
    }
    // deg gcd(p mod P, p' mod P) >= deg gcd(p, p') when P does not divide
    // the leading coefficient of p.
    gcd_degree_mod_p(p, &p.derivative()) == Some(0)
}

/// Square-free decomposition `p = c * Π f_i^i` over the rationals (Yun),
/// returning the non-constant `f_i` with their multiplicities `i`, each as a
/// primitive integer polynomial with positive leading coefficient.
pub fn squarefree_decomposition(p: &IntPoly) -> Vec<(IntPoly, u32)> {
    let normalize = |q: &RationalPoly| {
        let mut ip = IntPoly::from_rational(q);
        if ip.leading().is_negative() {
            ip = ip.neg();
        }
        ip
    };
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    if squarefree_certified_mod_p(p) {
        let mut f = p.clone();
        if f.leading().is_negative() {
            f = f.neg();
        }
        return vec![(f, 1)];
    }
    let f = p.to_rational();
    let fp = f.derivative();
    let a0 = f.gcd(&fp);
    let mut b = f.div_rem(&a0).unwrap().0;
    let c = fp.div_rem(&a0).unwrap().0;
    let mut d = &c - &b.derivative();
    let mut out = Vec::new();
    let mut i = 1u32;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        let nb = b.div_rem(&a).unwrap().0;
        let nc = d.div_rem(&a).unwrap().0;
        if a.degree().unwrap_or(0) > 0 {
            out.push((normalize(&a), i));
        }
        d = &nc - &nb.derivative();
        b = nb;
        i += 1;
    }
    out
}
