//! Residue-class bounds for `P_n^{g_d}(x)`, radius estimates `r(x)`, the
//! explicit thresholds `d_0(n, x)` beyond which the sign of `Δ_n^{g_d}(x)`
//! is settled, and an exact verifier for those thresholds.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{check_class_d, ArithFn, DoubleSequence};
use crate::genpoly::{Sign, ValueSequence};
use crate::interval::{Interval, DEFAULT_BITS};
use crate::rational::{ceil, factorial, format_rational, int, ratio, to_f64};
use crate::{Error, Result};

/// A radius `r` with `P_n^{g_1}(x) r^n <= 1` checked exactly for
/// `1 <= n <= validated_to`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusEstimate {
    pub g1: String,
    pub x: BigRational,
    pub r: BigRational,
    pub validated_to: u64,
    pub safety_factor: BigRational,
}

impl RadiusEstimate {
    /// Same radius scaled by `factor` in `(0, 1]`; stays valid.
    pub fn scaled(&self, factor: &BigRational) -> Result<Self> {
        if !factor.is_positive() || *factor > BigRational::one() {
            return Err(Error::InvalidArgument("scale factor must lie in (0, 1]".into()));
        }
        Ok(Self {
            r: &self.r * factor,
            safety_factor: &self.safety_factor * factor,
            ..self.clone()
        })
    }
}

/// Largest `n <= n_max` such that `P_k^{g_1}(x) r^k <= 1` for every
/// `k <= n`.
pub fn validate_r(g1: &ArithFn, x: &BigRational, r: &BigRational, n_max: u64) -> Result<u64> {
    if !r.is_positive() {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    let mut v = ValueSequence::for_function(g1, x)?;
    v.extend_to(&g1.prefix(n_max)?, n_max)?;
    let mut rp = BigRational::one();
    for n in 1..=n_max {
        rp *= r;
        if v.get(n).unwrap() * &rp > BigRational::one() {
            return Ok(n - 1);
        }
    }
    Ok(n_max)
}

/// Dyadic rational not above `v`, with about 40 significant bits.
fn dyadic_below(v: f64) -> BigRational {
    let scale = 2f64.powi(40 - v.log2().ceil() as i32);
    let num = (v * scale).floor();
    let den_exp = (scale.log2().round()) as i64;
    let n = BigInt::from(num as i64);
    if den_exp >= 0 {
        BigRational::new(n, BigInt::one() << den_exp as usize)
    } else {
        BigRational::from_integer(n << (-den_exp) as usize)
    }
}

/// `r = safety · min_{n <= N} P_n^{g_1}(x)^{-1/n}`, each root taken as a
/// rational from below, then re-validated exactly up to `N`.
pub fn estimate_r(
    g1: &ArithFn,
    x: &BigRational,
    n_max: u64,
    safety_factor: &BigRational,
) -> Result<RadiusEstimate> {
    if !x.is_positive() {
        return Err(Error::Domain("r(x) is estimated for x > 0 only".into()));
    }
    if n_max == 0 {
        return Err(Error::InvalidArgument("validation depth must be at least 1".into()));
    }
    if !safety_factor.is_positive() || *safety_factor > BigRational::one() {
        return Err(Error::InvalidArgument("safety factor must lie in (0, 1]".into()));
    }
    let mut v = ValueSequence::for_function(g1, x)?;
    v.extend_to(&g1.prefix(n_max)?, n_max)?;
    let mut best: Option<BigRational> = None;
    for n in 1..=n_max {
        let p = v.get(n).unwrap();
        if !p.is_positive() {
            return Err(Error::Domain(format!("P_{n}(x) is not positive")));
        }
        let approx = (-crate::rational::ln_f64(&p) / n as f64).exp();
        let mut cand = dyadic_below(approx * (1.0 - 1e-9));
        let mut guard = 0;
        while &p * num_traits::pow(cand.clone(), n as usize) > BigRational::one() {
            cand = cand * ratio(255, 256);
            guard += 1;
            if guard > 10_000 {
                return Err(Error::Internal("radius root search did not settle".into()));
            }
        }
        best = Some(match best {
            Some(b) if b <= cand => b,
            _ => cand,
        });
    }
    let r = best.unwrap() * safety_factor;
    let validated_to = validate_r(g1, x, &r, n_max)?;
    if validated_to < n_max {
        return Err(Error::Internal(format!(
            "radius estimate failed exact validation at n = {}",
            validated_to + 1
        )));
    }
    Ok(RadiusEstimate {
        g1: g1.label().to_string(),
        x: x.clone(),
        r,
        validated_to,
        safety_factor: safety_factor.clone(),
    })
}

/// The three residue classes of `n` modulo 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidueCase {
    Zero,
    One,
    Two,
}

impl ResidueCase {
    pub fn of(n: u64) -> Self {
        match n % 3 {
            0 => ResidueCase::Zero,
            1 => ResidueCase::One,
            _ => ResidueCase::Two,
        }
    }

    /// Sign of `Δ_n^{g_d}(x)` for all large `d`: nonnegative for `n ≡ 0`,
    /// negative otherwise.
    pub fn expected_nonnegative(self) -> bool {
        self == ResidueCase::Zero
    }
}

/// Lower and upper bounds for `P_n^{g_d}(x)` by the residue of `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub residue: u8,
    pub n: u64,
    pub d: u32,
    pub x: String,
    pub lower: String,
    pub value: String,
    pub upper: String,
    /// Two-term upper bound for `n ≡ 2 (mod 3)`, `n >= 8`.
    pub improved_upper: Option<String>,
    pub lower_strict: bool,
    pub upper_holds: bool,
    pub improved_holds: Option<bool>,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.lower_strict && self.upper_holds && self.improved_holds.unwrap_or(true)
    }
}

fn pow_u(base: BigInt, e: u64) -> BigRational {
    BigRational::from_integer(num_traits::pow(base, e as usize))
}

fn x_pow(x: &BigRational, e: u64) -> BigRational {
    num_traits::pow(x.clone(), e as usize)
}

/// Bounds from the values `value = P_n^{g_d}(x)` and `value1 = P_n^{g_1}(x)`.
pub fn bounds_from_values(
    n: u64,
    d: u32,
    x: &BigRational,
    value: &BigRational,
    value1: &BigRational,
) -> Result<BoundReport> {
    if n < 3 {
        return Err(Error::Domain("the residue-class bounds need n >= 3".into()));
    }
    if d == 0 {
        return Err(Error::Domain("the residue-class bounds need d >= 1".into()));
    }
    if !x.is_positive() {
        return Err(Error::Domain("the residue-class bounds need x > 0".into()));
    }
    let e = (d - 1) as u64;
    let fact = |k: u64| BigRational::from_integer(factorial(k));
    let (lower, upper, improved) = match n % 3 {
        0 => {
            let np = n / 3;
            let c = pow_u(BigInt::from(3), e * np);
            (&c * x_pow(x, np) / fact(np), &c * value1, None)
        }
        1 => {
            let np = (n - 4) / 3;
            let c = pow_u(BigInt::from(4) * num_traits::pow(BigInt::from(3), np as usize), e);
            let poly = x_pow(x, np + 1) + x_pow(x, np + 2) / int(2);
            (&c * poly / fact(np), &c * value1, None)
        }
        _ => {
            let np = (n - 2) / 3;
            let c = pow_u(BigInt::from(2) * num_traits::pow(BigInt::from(3), np as usize), e);
            let lower = &c * x_pow(x, np + 1) / fact(np);
            let improved = (n >= 8).then(|| {
                let c16 = pow_u(BigInt::from(16) * num_traits::pow(BigInt::from(3), np as usize - 2), e);
                &lower + c16 * value1
            });
            (lower, &c * value1, improved)
        }
    };
    Ok(BoundReport {
        residue: (n % 3) as u8,
        n,
        d,
        x: format_rational(x),
        lower_strict: lower < *value,
        upper_holds: *value <= upper,
        improved_holds: improved.as_ref().map(|u| value <= u),
        lower: format_rational(&lower),
        value: format_rational(value),
        upper: format_rational(&upper),
        improved_upper: improved.as_ref().map(format_rational),
    })
}

/// Bounds for one `(n, d, x)`; checks class membership on the needed prefix.
pub fn prop1_bounds(seq: &DoubleSequence, n: u64, d: u32, x: &BigRational) -> Result<BoundReport> {
    if n < 3 {
        return Err(Error::Domain("the residue-class bounds need n >= 3".into()));
    }
    let class = check_class_d(seq, d.max(1), n)?;
    if !class.holds() {
        return Err(Error::InvalidArgument(format!(
            "`{}` violates the class inequality: {:?}",
            seq.label(),
            class.violation
        )));
    }
    let v = |g: &ArithFn| -> Result<BigRational> {
        let mut s = ValueSequence::for_function(g, x)?;
        s.extend_to(&g.prefix(n)?, n)?;
        Ok(s.get(n).unwrap())
    };
    bounds_from_values(n, d, x, &v(&seq.member(d))?, &v(&seq.member(1))?)
}

/// All bound reports on a grid, one value sequence per `(d, x)`.
pub fn prop1_grid(
    seq: &DoubleSequence,
    d_max: u32,
    n_max: u64,
    xs: &[BigRational],
) -> Result<Vec<BoundReport>> {
    let class = check_class_d(seq, d_max, n_max)?;
    if !class.holds() {
        return Err(Error::InvalidArgument(format!(
            "`{}` violates the class inequality: {:?}",
            seq.label(),
            class.violation
        )));
    }
    let values = |d: u32, x: &BigRational| -> Result<Vec<BigRational>> {
        let g = seq.member(d);
        let mut s = ValueSequence::for_function(&g, x)?;
        s.extend_to(&g.prefix(n_max)?, n_max)?;
        Ok(s.values())
    };
    let jobs: Vec<(u32, BigRational)> = (1..=d_max)
        .flat_map(|d| xs.iter().map(move |x| (d, x.clone())))
        .collect();
    let base: Vec<Vec<BigRational>> = xs.iter().map(|x| values(1, x)).collect::<Result<_>>()?;
    let chunks: Vec<Vec<BoundReport>> = jobs
        .par_iter()
        .map(|(d, x)| {
            let xi = xs.iter().position(|y| y == x).unwrap();
            let vd = values(*d, x)?;
            (3..=n_max)
                .map(|n| bounds_from_values(n, *d, x, &vd[n as usize], &base[xi][n as usize]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Enclosure of `d_0(n, x)` and the integer threshold `ceil(upper end)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Threshold {
    pub n: u64,
    pub x: BigRational,
    pub r: BigRational,
    pub case: ResidueCase,
    pub d0: Interval,
    pub threshold: u64,
}

impl Threshold {
    pub fn d0_f64(&self) -> f64 {
        self.d0.midpoint_f64()
    }
}

/// The explicit threshold `d_0(n, x)` for a given `r`, enclosed with outward
/// rounding so the returned integer threshold is never too small.
pub fn d0(n: u64, x: &BigRational, r: &BigRational) -> Result<Threshold> {
    if n < 3 || n == 5 {
        return Err(Error::Domain(format!(
            "thresholds are available for n >= 3 with n != 5, got n = {n}"
        )));
    }
    if !x.is_positive() {
        return Err(Error::Domain("thresholds need x > 0".into()));
    }
    if !r.is_positive() {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    let bits = DEFAULT_BITS;
    let pt = |v: BigRational| Interval::point(v);
    let ln = |v: BigRational| pt(v).ln(bits);
    let ln98 = ln(ratio(9, 8))?;
    let ln_x = ln(x.clone())?;
    let ln_r = ln(r.clone())?;
    let case = ResidueCase::of(n);
    let nq = BigRational::from_integer(BigInt::from(n));
    let d0 = match case {
        ResidueCase::Zero | ResidueCase::One => {
            let m = if case == ResidueCase::Zero {
                &nq / int(3)
            } else {
                (&nq - int(1)) / int(3)
            };
            let inner = ln(m)?.sub(&ln_x).sub(&ln_r.mul(&Interval::from_int(3)));
            let factor = pt(int(2) * &nq / int(3)).div(&ln98)?;
            Interval::from_int(1).add(&factor.mul(&inner))
        }
        ResidueCase::Two => {
            let limit = int(2) - int(12) / (&nq + int(4));
            if *x >= limit {
                return Err(Error::Domain(format!(
                    "case n ≡ 2 (mod 3) needs 0 < x < 2 - 12/(n+4) = {}, got x = {}",
                    format_rational(&limit),
                    format_rational(x)
                )));
            }
            let arg = (&nq - int(2)) / (int(3) * &nq + int(3)) * (x.recip() + ratio(1, 2)) - ratio(1, 3);
            if !arg.is_positive() {
                return Err(Error::Domain(format!(
                    "logarithm argument {} is not positive",
                    format_rational(&arg)
                )));
            }
            let m = (&nq - int(2)) / int(3);
            let inner = ln(arg)?
                .neg()
                .add(&pt(m.clone()).mul(&ln(m)?))
                .sub(&pt((&nq + int(1)) / int(3)).mul(&ln_x))
                .sub(&pt(nq.clone()).mul(&ln_r));
            Interval::from_int(1).add(&inner.div(&ln98)?)
        }
    };
    let d0 = d0.round_outward(bits);
    let t = ceil(d0.hi()).max(BigInt::one());
    Ok(Threshold {
        n,
        x: x.clone(),
        r: r.clone(),
        case,
        d0,
        threshold: t.to_u64().ok_or_else(|| Error::OutOfRange("threshold exceeds u64".into()))?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdCheck {
    pub d: u32,
    pub sign: Sign,
    pub as_claimed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub family: String,
    pub n: u64,
    pub x: String,
    pub r: String,
    pub case: ResidueCase,
    pub d0: f64,
    pub d0_upper: String,
    pub threshold: u64,
    /// `">= 0"` or `"< 0"`.
    pub claim: String,
    pub checks: Vec<ThresholdCheck>,
    pub holds: bool,
}

/// Computes `d_0`, then checks the claimed sign of `Δ_n^{g_d}(x)` exactly
/// for every `d` in `[threshold, threshold + window]`.
pub fn verify_thresholds(
    family: &DoubleSequence,
    n: u64,
    x: &BigRational,
    radius: &RadiusEstimate,
    window: u32,
    mem_budget: Option<usize>,
) -> Result<ThresholdReport> {
    if radius.x != *x {
        return Err(Error::InvalidArgument("radius estimate is for a different x".into()));
    }
    if radius.validated_to < n + 1 {
        return Err(Error::InvalidArgument(format!(
            "radius is validated to n = {}, the check needs n = {}",
            radius.validated_to,
            n + 1
        )));
    }
    let t = d0(n, x, &radius.r)?;
    let first = u32::try_from(t.threshold)
        .map_err(|_| Error::OutOfRange("threshold exceeds the supported d range".into()))?;
    let last = first
        .checked_add(window)
        .ok_or_else(|| Error::OutOfRange("threshold window overflows".into()))?;
    if let Some(budget) = mem_budget {
        // n + 2 values of about d log2(n+1) + log2((n+1)! s^{n+1}) bits each.
        let bits_per = last as f64 * ((n + 1) as f64).log2() * (n + 1) as f64 + 64.0 * (n + 2) as f64;
        let needed = ((n + 2) as f64 * bits_per / 8.0) as usize * (window as usize + 1);
        if needed > budget {
            return Err(Error::Budget { budget, needed });
        }
    }
    let claim_nonneg = t.case.expected_nonnegative();
    let checks: Vec<ThresholdCheck> = (first..=last)
        .into_par_iter()
        .map(|d| {
            let g = family.member(d);
            let mut v = ValueSequence::for_function(&g, x)?;
            v.extend_to(&g.prefix(n + 1)?, n + 1)?;
            let sign = v.delta_sign(n).unwrap();
            let as_claimed = if claim_nonneg {
                sign != Sign::Negative
            } else {
                sign == Sign::Negative
            };
            Ok(ThresholdCheck { d, sign, as_claimed })
        })
        .collect::<Result<_>>()?;
    Ok(ThresholdReport {
        family: family.label().to_string(),
        n,
        x: format_rational(x),
        r: format_rational(&radius.r),
        case: t.case,
        d0: t.d0_f64(),
        d0_upper: format_rational(t.d0.hi()),
        threshold: t.threshold,
        claim: if claim_nonneg { ">= 0" } else { "< 0" }.into(),
        holds: checks.iter().all(|c| c.as_claimed),
        checks,
    })
}

/// `f64` view of a rational, for reports.
pub fn approx(v: &BigRational) -> f64 {
    to_f64(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_estimates_validate() {
        let half = ratio(1, 2);
        assert_eq!(validate_r(&ArithFn::sigma(1), &int(1), &half, 50).unwrap(), 50);
        assert_eq!(validate_r(&ArithFn::identity(), &int(1), &ratio(1, 3), 50).unwrap(), 50);
        // r = 1 fails at n = 2 for partitions (p(2) = 2).
        assert_eq!(validate_r(&ArithFn::sigma(1), &int(1), &int(1), 50).unwrap(), 1);

        let est = estimate_r(&ArithFn::sigma(1), &int(1), 40, &ratio(9, 10)).unwrap();
        assert_eq!(est.validated_to, 40);
        let halved = est.scaled(&half).unwrap();
        assert_eq!(validate_r(&ArithFn::sigma(1), &int(1), &halved.r, 40).unwrap(), 40);
        assert!(estimate_r(&ArithFn::sigma(1), &int(0), 10, &half).is_err());
    }

    #[test]
    fn d0_trivial_and_domain_cases() {
        let t = d0(9, &int(3), &int(1)).unwrap();
        assert!(t.d0.contains(&int(1)));
        // The enclosure straddles 1, so the integer threshold rounds up.
        assert_eq!(t.threshold, 2);
        let err = d0(8, &ratio(3, 2), &ratio(1, 2)).unwrap_err();
        assert!(err.to_string().contains("2 - 12/(n+4)"));
        assert!(d0(8, &int(1), &ratio(1, 2)).is_err());
        assert!(d0(5, &ratio(1, 2), &ratio(1, 2)).is_err());
        assert!(d0(2, &int(1), &ratio(1, 2)).is_err());
    }

    #[test]
    fn d0_worked_example() {
        // 1 + (6 / ln(9/8)) (ln 3 + 3 ln 2)
        let t = d0(9, &int(1), &ratio(1, 2)).unwrap();
        let expected = 1.0 + 6.0 / (9f64 / 8.0).ln() * (3f64.ln() + 3.0 * 2f64.ln());
        assert!((t.d0_f64() - expected).abs() < 1e-9);
        assert_eq!(t.threshold, 163);
        assert!(to_f64(&t.d0.width()) < 1e-30);
    }

    #[test]
    fn d0_decreases_in_r() {
        for n in [6u64, 7, 9, 10, 11] {
            let x = if n == 11 { int(1) } else { ratio(1, 2) };
            let mut prev: Option<f64> = None;
            for r in [ratio(1, 8), ratio(1, 4), ratio(1, 3), ratio(1, 2)] {
                let v = d0(n, &x, &r).unwrap().d0_f64();
                if let Some(p) = prev {
                    assert!(v < p, "n = {n}");
                }
                prev = Some(v);
            }
        }
    }

    #[test]
    fn bound_examples() {
        let seq = DoubleSequence::sigma();
        let r = prop1_bounds(&seq, 7, 2, &int(1)).unwrap();
        assert_eq!(r.residue, 1);
        assert!(r.holds());
        // d = 1 attains the upper bound.
        let r = prop1_bounds(&seq, 6, 1, &ratio(1, 2)).unwrap();
        assert!(r.holds());
        assert_eq!(r.upper, r.value);
        assert_eq!(r.lower, "1/8");
        let r = prop1_bounds(&DoubleSequence::psi(), 11, 3, &int(2)).unwrap();
        assert!(r.improved_upper.is_some() && r.holds());
        assert!(prop1_bounds(&seq, 2, 1, &int(1)).is_err());
    }

    #[test]
    fn small_grid_sandwich() {
        for seq in [DoubleSequence::sigma(), DoubleSequence::psi()] {
            let reports = prop1_grid(&seq, 3, 20, &[ratio(1, 2), int(1), int(2)]).unwrap();
            assert_eq!(reports.len(), 3 * 3 * 18);
            assert!(reports.iter().all(BoundReport::holds));
        }
    }

    #[test]
    fn threshold_window_small_case() {
        // n = 6 with a radius validated well past n.
        let est = estimate_r(&ArithFn::identity(), &int(1), 20, &ratio(9, 10)).unwrap();
        let rep = verify_thresholds(&DoubleSequence::psi(), 6, &int(1), &est, 2, None).unwrap();
        assert!(rep.holds, "{rep:?}");
        assert_eq!(rep.checks.len(), 3);
        let short = RadiusEstimate { validated_to: 3, ..est };
        assert!(verify_thresholds(&DoubleSequence::psi(), 6, &int(1), &short, 2, None).is_err());
    }
}
