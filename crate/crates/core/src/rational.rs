//! Parsing and formatting of exact rationals as reduced `p/q` strings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"1.5"` into a reduced
/// rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    let bad = || Error::Parse(format!("not an exact rational: `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.trim_start().starts_with('-');
        let int: BigInt = match int.trim() {
            "" | "-" | "+" => BigInt::zero(),
            t => t.parse().map_err(|_| bad())?,
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac: BigInt = frac.parse().map_err(|_| bad())?;
        let magnitude = int.abs() * &scale + frac;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(BigRational::new(numer, scale));
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}

/// Formats as `p` for integers and `p/q` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

/// Binomial coefficient `C(n, k)` for non-negative integers.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Generalized binomial `C(a, k) = a (a-1) ... (a-k+1) / k!` for rational `a`.
pub fn binomial_rational(a: &BigRational, k: u64) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..k {
        acc = acc * (a - BigRational::from_integer(BigInt::from(i)))
            / BigRational::from_integer(BigInt::from(i + 1));
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Floor of a rational as a big integer.
pub fn floor(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Ceiling of a rational as a big integer.
pub fn ceil(r: &BigRational) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

/// Approximate `f64` image, finite for any rational whose magnitude lies in
/// the `f64` range.
pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if let Some(v) = r.to_f64() {
        if v.is_finite() && (v != 0.0 || r.is_zero()) {
            return v;
        }
    }
    // Fall back to exponent arithmetic for extreme magnitudes.
    let (nb, db) = (r.numer().bits() as i64, r.denom().bits() as i64);
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let n = (r.numer() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift_d as usize).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n - shift_d) as i32)
}

/// Natural logarithm of a positive rational as `f64`, valid far outside the
/// `f64` range.
pub fn ln_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    debug_assert!(r.is_positive());
    let ln_big = |b: &BigInt| {
        let bits = b.bits() as i64;
        let shift = (bits - 60).max(0);
        let m = (b >> shift as usize).to_f64().unwrap_or(1.0);
        m.ln() + shift as f64 * std::f64::consts::LN_2
    };
    ln_big(r.numer()) - ln_big(r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse_rational("1").unwrap(), int(1));
        assert_eq!(parse_rational("6/4").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("-1/2").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("1.5").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), ratio(-1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn formats_reduced() {
        assert_eq!(format_rational(&ratio(6, 4)), "3/2");
        assert_eq!(format_rational(&int(-7)), "-7");
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(floor(&ratio(-3, 2)), BigInt::from(-2));
        assert_eq!(ceil(&ratio(-3, 2)), BigInt::from(-1));
        assert_eq!(ceil(&ratio(3, 2)), BigInt::from(2));
        assert_eq!(ceil(&int(4)), BigInt::from(4));
    }

    #[test]
    fn ln_f64_handles_huge_values() {
        let big = BigRational::from_integer(BigInt::from(10u32).pow(400));
        assert!((ln_f64(&big) - 400.0 * 10f64.ln()).abs() < 1e-9);
        assert!((ln_f64(&ratio(1, 8)) + 8f64.ln()).abs() < 1e-12);
    }
}
