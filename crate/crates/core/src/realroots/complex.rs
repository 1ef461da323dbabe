//! Simultaneous complex root approximation (Aberth–Ehrlich) in `f64`, with
//! escalation to a big-mantissa float when the `f64` run does not meet its
//! residual test. Real/non-real labels come from the exact real-root count.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{isolate_real_roots_refined, RootEnclosure};
use crate::exactpoly::RationalPoly;
use crate::{Error, Result};

/// Working precisions tried in order, in mantissa bits.
pub const PRECISION_LADDER: [u32; 3] = [53, 106, 212];

const MAX_ITERATIONS: usize = 2000;

pub trait Real: Clone + std::fmt::Debug {
    fn from_rational(q: &BigRational, prec: u32) -> Self;
    fn from_f64(v: f64, prec: u32) -> Self;
    fn zero(prec: u32) -> Self;
    fn to_f64(&self) -> f64;
    /// `log2 |self|`, `-inf` at zero.
    fn log2_abs(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Real for f64 {
    fn from_rational(q: &BigRational, _: u32) -> Self {
        crate::rational::to_f64(q)
    }
    fn from_f64(v: f64, _: u32) -> Self {
        v
    }
    fn zero(_: u32) -> Self {
        0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn log2_abs(&self) -> f64 {
        self.abs().log2()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

/// `man * 2^exp` with `|man| < 2^prec`.
#[derive(Clone, Debug)]
pub struct BigFloat {
    man: BigInt,
    exp: i64,
    prec: u32,
}

fn log2_bigint(n: &BigInt) -> f64 {
    let b = n.bits();
    if b <= 1000 {
        n.abs().to_f64().unwrap().log2()
    } else {
        let s = b - 64;
        (n.abs() >> s as usize).to_f64().unwrap().log2() + s as f64
    }
}

impl BigFloat {
    fn norm(man: BigInt, exp: i64, prec: u32) -> Self {
        if man.is_zero() {
            return Self { man, exp: 0, prec };
        }
        let b = man.bits();
        if b > prec as u64 {
            let s = b - prec as u64;
            Self {
                man: man >> s as usize,
                exp: exp + s as i64,
                prec,
            }
        } else {
            Self { man, exp, prec }
        }
    }

    fn top(&self) -> i64 {
        self.exp + self.man.bits() as i64
    }
}

impl Real for BigFloat {
    fn from_rational(q: &BigRational, prec: u32) -> Self {
        if q.is_zero() {
            return Self::zero(prec);
        }
        let shift = (prec as i64 + q.denom().bits() as i64 - q.numer().bits() as i64 + 2).max(0);
        let man = (q.numer() << shift as usize) / q.denom();
        Self::norm(man, -shift, prec)
    }

    fn from_f64(v: f64, prec: u32) -> Self {
        if v == 0.0 {
            return Self::zero(prec);
        }
        let (m, e, s) = v.integer_decode();
        let man = BigInt::from(m) * BigInt::from(s);
        Self::norm(man, e as i64, prec)
    }

    fn zero(prec: u32) -> Self {
        Self {
            man: BigInt::zero(),
            exp: 0,
            prec,
        }
    }

    fn to_f64(&self) -> f64 {
        if self.man.is_zero() {
            return 0.0;
        }
        let b = self.man.bits() as i64;
        let (m, e) = if b > 64 {
            ((&self.man >> (b - 64) as usize).to_f64().unwrap(), self.exp + b - 64)
        } else {
            (self.man.to_f64().unwrap(), self.exp)
        };
        let mut r = m;
        let mut e = e;
        while e > 1000 {
            r *= 2f64.powi(1000);
            e -= 1000;
        }
        while e < -1000 {
            r *= 2f64.powi(-1000);
            e += 1000;
        }
        r * 2f64.powi(e as i32)
    }

    fn log2_abs(&self) -> f64 {
        if self.man.is_zero() {
            f64::NEG_INFINITY
        } else {
            log2_bigint(&self.man) + self.exp as f64
        }
    }

    fn add(&self, o: &Self) -> Self {
        if self.man.is_zero() {
            return o.clone();
        }
        if o.man.is_zero() {
            return self.clone();
        }
        let guard = self.prec as i64 + 4;
        if self.top() < o.top() - guard {
            return o.clone();
        }
        if o.top() < self.top() - guard {
            return self.clone();
        }
        let (man, exp) = if self.exp >= o.exp {
            ((&self.man << (self.exp - o.exp) as usize) + &o.man, o.exp)
        } else {
            (&self.man + (&o.man << (o.exp - self.exp) as usize), self.exp)
        };
        Self::norm(man, exp, self.prec)
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Self) -> Self {
        Self::norm(&self.man * &o.man, self.exp + o.exp, self.prec)
    }

    fn div(&self, o: &Self) -> Self {
        assert!(!o.man.is_zero(), "BigFloat division by zero");
        let shift = (self.prec as i64 + o.man.bits() as i64 - self.man.bits() as i64 + 2).max(0);
        let man = (&self.man << shift as usize) / &o.man;
        Self::norm(man, self.exp - o.exp - shift, self.prec)
    }

    fn neg(&self) -> Self {
        Self {
            man: -&self.man,
            exp: self.exp,
            prec: self.prec,
        }
    }

    fn is_zero(&self) -> bool {
        self.man.is_zero()
    }
}

#[derive(Clone, Debug)]
struct C<R> {
    re: R,
    im: R,
}

impl<R: Real> C<R> {
    fn add(&self, o: &Self) -> Self {
        C { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }
    fn sub(&self, o: &Self) -> Self {
        C { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }
    fn mul(&self, o: &Self) -> Self {
        C {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }
    fn scale(&self, r: &R) -> Self {
        C { re: self.re.mul(r), im: self.im.mul(r) }
    }
    fn log2_abs(&self) -> f64 {
        let a = self.re.log2_abs();
        let b = self.im.log2_abs();
        let m = a.max(b);
        if m == f64::NEG_INFINITY {
            return m;
        }
        m + 0.5 * (1.0 + 2f64.powf(2.0 * (a.min(b) - m))).log2()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn recip(&self) -> Self {
        // Scale first to keep |.|^2 in range for f64.
        let big = if self.re.log2_abs() >= self.im.log2_abs() { &self.re } else { &self.im };
        let s = big.clone();
        let a = self.re.div(&s);
        let b = self.im.div(&s);
        let den = a.mul(&a).add(&b.mul(&b)).mul(&s);
        C { re: a.div(&den), im: b.neg().div(&den) }
    }
    fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }
    fn one_like(prec: u32) -> Self {
        C { re: R::from_f64(1.0, prec), im: R::zero(prec) }
    }
}

/// `p / p'` at `z` and the relative residual `|p(z)| / Σ |c_i| |z|^i`,
/// evaluating the reversed polynomial when `|z| > 1` to stay in range.
fn newton_ratio<R: Real>(c: &[R], abs_c: &[f64], z: &C<R>, prec: u32) -> (Option<C<R>>, f64) {
    let n = c.len() - 1;
    let outside = z.log2_abs() > 0.0;
    let w = if outside { z.recip() } else { z.clone() };
    let lw = w.log2_abs();
    let mut pv = C { re: R::zero(prec), im: R::zero(prec) };
    let mut dv = pv.clone();
    let mut bound = 0f64;
    let order: Box<dyn Iterator<Item = usize>> = if outside {
        Box::new(0..=n)
    } else {
        Box::new((0..=n).rev())
    };
    let aw = 2f64.powf(lw.max(-1e4));
    for i in order {
        dv = dv.mul(&w).add(&pv);
        pv = pv.mul(&w);
        pv.re = pv.re.add(&c[i]);
        bound = bound * aw + abs_c[i];
    }
    let residual = 2f64.powf(pv.log2_abs() - bound.log2());
    if pv.is_zero() {
        return (None, 0.0);
    }
    if dv.is_zero() && !outside {
        return (Some(C { re: R::zero(prec), im: R::zero(prec) }), residual);
    }
    if outside {
        // p(z) = z^n q(w), p'(z) = z^{n-1} (n q(w) - w q'(w)).
        let nn = R::from_f64(n as f64, prec);
        let denom = pv.scale(&nn).sub(&w.mul(&dv));
        if denom.is_zero() {
            return (Some(C { re: R::zero(prec), im: R::zero(prec) }), residual);
        }
        (Some(z.mul(&pv).div(&denom)), residual)
    } else {
        (Some(pv.div(&dv)), residual)
    }
}

/// Upper convex hull of `(i, log2|c_i|)` gives starting radii.
fn newton_polygon_start(logs: &[f64]) -> Vec<(f64, f64)> {
    let n = logs.len() - 1;
    let pts: Vec<(usize, f64)> = logs
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .map(|(i, &v)| (i, v))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (i1, y1) = hull[hull.len() - 2];
            let (i2, y2) = hull[hull.len() - 1];
            let cross = (i2 as f64 - i1 as f64) * (p.1 - y1) - (y2 - y1) * (p.0 as f64 - i1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let sigma = 0.7;
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (i, yi) = w[0];
        let (j, yj) = w[1];
        let k = j - i;
        let log_r = (yi - yj) / k as f64;
        for m in 0..k {
            let ang = 2.0 * std::f64::consts::PI * (m as f64 / k as f64 + i as f64 / n as f64) + sigma;
            out.push((log_r, ang));
        }
    }
    out
}

struct Run<R> {
    z: Vec<C<R>>,
    converged: Vec<bool>,
    residual: Vec<f64>,
}

fn aberth<R: Real>(c: &[R], start: Vec<C<R>>, prec: u32) -> Run<R> {
    let n = c.len() - 1;
    let abs_c: Vec<f64> = c.iter().map(|v| 2f64.powf(v.log2_abs())).collect();
    let mut z = start;
    let mut done = vec![false; n];
    let mut residual = vec![f64::INFINITY; n];
    let tol = -(prec as f64) + 4.0;
    let one = C::<R>::one_like(prec);
    for _ in 0..MAX_ITERATIONS {
        let mut all = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (ratio, res) = newton_ratio(c, &abs_c, &z[k], prec);
            residual[k] = res;
            let Some(ratio) = ratio else {
                done[k] = true;
                continue;
            };
            // At the noise floor further steps only wander.
            if residual_ok(res, n, prec) {
                done[k] = true;
                continue;
            }
            let mut s = C { re: R::zero(prec), im: R::zero(prec) };
            for j in 0..n {
                if j != k {
                    let d = z[k].sub(&z[j]);
                    if !d.is_zero() {
                        s = s.add(&d.recip());
                    }
                }
            }
            let denom = one.sub(&ratio.mul(&s));
            let step = if denom.is_zero() { ratio } else { ratio.div(&denom) };
            z[k] = z[k].sub(&step);
            if step.log2_abs() <= z[k].log2_abs() + tol || step.is_zero() {
                done[k] = true;
                residual[k] = newton_ratio(c, &abs_c, &z[k], prec).1;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    Run {
        z,
        converged: done,
        residual,
    }
}

/// One representative per root: real roots on the axis, conjugate pairs once
/// with `im > 0`.
#[derive(Debug, Clone, Serialize)]
pub struct ComplexRootApprox {
    pub re: f64,
    pub im: f64,
    pub is_real: bool,
    pub multiplicity: u32,
    /// `|p(z)| / Σ |c_i| |z|^i` at the returned point; 0 for exact real roots.
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct RootPicture {
    pub roots: Vec<ComplexRootApprox>,
    /// Exact real roots (distinct).
    pub real_roots: Vec<RootEnclosure>,
    /// Working precision of the final numerical run.
    pub precision_bits: u32,
    /// All numerical roots passed the residual test and the non-real ones
    /// paired up consistently with the exact real-root count.
    pub certified: bool,
}

impl RootPicture {
    /// The root of largest real part (ties broken towards the real axis).
    pub fn rightmost(&self) -> Option<&ComplexRootApprox> {
        self.roots.iter().max_by(|a, b| {
            a.re
                .partial_cmp(&b.re)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(b.is_real.cmp(&a.is_real).reverse())
        })
    }

    pub fn positive_real(&self) -> Vec<&RootEnclosure> {
        self.real_roots.iter().filter(|r| r.is_positive()).collect()
    }
}

fn residual_ok(res: f64, n: usize, prec: u32) -> bool {
    res <= 2f64.powf(-(prec as f64)) * 64.0 * (n as f64 + 1.0) * (n as f64 + 1.0)
}

/// All complex roots of `p`, labelled against its exact real roots.
pub fn complex_roots(p: &RationalPoly) -> Result<RootPicture> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let v = p.x_valuation().unwrap_or(0);
    let q = p.shift_down(v)?;
    let n = q.degree().unwrap_or(0);
    let width = BigRational::new(BigInt::from(1), BigInt::from(1) << 70usize);
    let real_roots = isolate_real_roots_refined(p, &width)?;
    let mut out: Vec<ComplexRootApprox> = real_roots
        .iter()
        .map(|r| ComplexRootApprox {
            re: r.to_f64(),
            im: 0.0,
            is_real: true,
            multiplicity: r.multiplicity,
            residual: 0.0,
            converged: true,
        })
        .collect();
    if n == 0 {
        return Ok(RootPicture {
            roots: out,
            real_roots,
            precision_bits: 0,
            certified: true,
        });
    }
    let nonzero_real: usize = real_roots
        .iter()
        .filter(|r| !(r.is_exact() && r.lo.is_zero()))
        .map(|r| r.multiplicity as usize)
        .sum();

    // Scale x = 2^s y so that the roots cluster around the unit circle and
    // normalise the largest coefficient to about 1.
    let logs: Vec<f64> = q
        .coeffs()
        .iter()
        .map(|c| {
            if c.is_zero() {
                f64::NEG_INFINITY
            } else {
                log2_bigint(c.numer()) - log2_bigint(c.denom())
            }
        })
        .collect();
    let s = ((logs[0] - logs[n]) / n as f64).round() as i64;
    let scaled_logs: Vec<f64> = logs.iter().enumerate().map(|(i, l)| l + (i as i64 * s) as f64).collect();
    let top = scaled_logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).round() as i64;
    let pow2 = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(BigInt::from(1) << e as usize)
        } else {
            BigRational::new(BigInt::from(1), BigInt::from(1) << (-e) as usize)
        }
    };
    let scaled: Vec<BigRational> = q
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * pow2(i as i64 * s - top))
        .collect();
    let start_polar = newton_polygon_start(&scaled_logs);
    let mut approx: Vec<(f64, f64)> = Vec::new();
    let mut converged = vec![false; n];
    let mut residuals = vec![f64::INFINITY; n];
    let mut precision_bits = 0;
    let mut ok = false;

    for &prec in &PRECISION_LADDER {
        precision_bits = prec;
        let (zs, conv, res) = if prec == 53 {
            let c: Vec<f64> = scaled.iter().map(|v| f64::from_rational(v, prec)).collect();
            let start: Vec<C<f64>> = start_polar
                .iter()
                .map(|&(lr, a)| {
                    let r = 2f64.powf(lr.clamp(-500.0, 500.0));
                    C { re: r * a.cos(), im: r * a.sin() }
                })
                .collect();
            let run = aberth(&c, start, prec);
            (
                run.z.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>(),
                run.converged,
                run.residual,
            )
        } else {
            let c: Vec<BigFloat> = scaled.iter().map(|v| BigFloat::from_rational(v, prec)).collect();
            let start: Vec<C<BigFloat>> = approx
                .iter()
                .map(|&(re, im)| C {
                    re: BigFloat::from_f64(re, prec),
                    im: BigFloat::from_f64(im, prec),
                })
                .collect();
            let run = aberth(&c, start, prec);
            (
                run.z.iter().map(|z| (z.re.to_f64(), z.im.to_f64())).collect::<Vec<_>>(),
                run.converged,
                run.residual,
            )
        };
        approx = zs;
        residuals = res.clone();
        converged = conv
            .iter()
            .zip(&res)
            .map(|(&c, &r)| c && residual_ok(r, n, prec))
            .collect();
        let consistent = pair_up(&approx, nonzero_real).is_some();
        if converged.iter().all(|&c| c) && consistent {
            ok = true;
            break;
        }
    }

    let scale = 2f64.powi(s as i32);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| approx[a].1.abs().partial_cmp(&approx[b].1.abs()).unwrap());
    let nonreal = &order[nonzero_real.min(n)..];
    let paired = pair_up(&approx, nonzero_real).is_some();
    for &k in nonreal {
        let (re, im) = approx[k];
        if im > 0.0 || (!paired && im >= 0.0) {
            out.push(ComplexRootApprox {
                re: re * scale,
                im: im * scale,
                is_real: false,
                multiplicity: 1,
                residual: residuals[k],
                converged: converged[k],
            });
        }
    }
    Ok(RootPicture {
        roots: out,
        real_roots,
        precision_bits,
        certified: ok,
    })
}

/// Checks that, after setting aside the `real` approximations closest to the
/// axis, the rest split evenly between the two half-planes.
fn pair_up(approx: &[(f64, f64)], real: usize) -> Option<()> {
    let n = approx.len();
    if real > n || (n - real) % 2 == 1 {
        return None;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| approx[a].1.abs().partial_cmp(&approx[b].1.abs()).unwrap());
    let rest = &order[real..];
    let upper = rest.iter().filter(|&&k| approx[k].1 > 0.0).count();
    let lower = rest.iter().filter(|&&k| approx[k].1 < 0.0).count();
    (upper == lower && upper * 2 == rest.len()).then_some(())
}
