//! The polynomials `P_n^g(x)` defined by
//! `P_0 = 1`, `P_n = (x/n) Σ_{k=1}^{n} g(k) P_{n-k}`,
//! as full polynomials or as values at a fixed rational point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::ArithFn;
use crate::exactpoly::{series_exp, RationalPoly, TruncatedSeries};
use crate::rational::{binomial, factorial, format_rational, parse_rational};
use crate::{Error, Result};

/// Largest `n` accepted by [`composition_oracle`]; the number of partitions
/// of 40 is 37338.
pub const PARTITION_ORACLE_MAX_N: u64 = 40;
/// Largest `n` accepted by [`composition_oracle_ordered`] (`2^{n-1}` terms).
pub const ORDERED_ORACLE_MAX_N: u64 = 16;

/// `P_0, ..., P_N` for one arithmetic function.
#[derive(Debug, Clone)]
pub struct PolySequence {
    label: String,
    g: Vec<BigRational>,
    polys: Vec<RationalPoly>,
}

pub fn build_sequence(g: &ArithFn, n_max: u64) -> Result<PolySequence> {
    let gv = g.prefix(n_max)?;
    let mut polys: Vec<RationalPoly> = Vec::with_capacity(n_max as usize + 1);
    polys.push(RationalPoly::one());
    for n in 1..=n_max as usize {
        // Σ_k g(k) P_{n-k} has degree n - 1.
        let mut acc = vec![BigRational::zero(); n];
        for k in 1..=n {
            let gk = &gv[k - 1];
            if gk.is_zero() {
                continue;
            }
            for (i, c) in polys[n - k].coeffs().iter().enumerate() {
                acc[i] += gk * c;
            }
        }
        let inv_n = BigRational::new(BigInt::one(), BigInt::from(n));
        let mut coeffs = Vec::with_capacity(n + 1);
        coeffs.push(BigRational::zero());
        coeffs.extend(acc.into_iter().map(|c| c * &inv_n));
        polys.push(RationalPoly::from_coeffs(coeffs));
    }
    Ok(PolySequence {
        label: g.label().to_string(),
        g: gv,
        polys,
    })
}

impl PolySequence {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn built_to(&self) -> u64 {
        (self.polys.len() - 1) as u64
    }

    pub fn get(&self, n: u64) -> Result<&RationalPoly> {
        self.polys.get(n as usize).ok_or_else(|| {
            Error::OutOfRange(format!("P_{n} requested, sequence built to {}", self.built_to()))
        })
    }

    pub fn polys(&self) -> &[RationalPoly] {
        &self.polys
    }

    /// `g(k)` for `1 <= k <= built_to`.
    pub fn g(&self, k: u64) -> &BigRational {
        &self.g[(k - 1) as usize]
    }

    pub fn g_values(&self) -> &[BigRational] {
        &self.g
    }

    /// `A_{n,k}`, the coefficient of `x^k` in `P_n`.
    pub fn coefficient(&self, n: u64, k: u64) -> Result<BigRational> {
        if k > n {
            return Err(Error::OutOfRange(format!("A_{{{n},{k}}} needs k <= n")));
        }
        Ok(self.get(n)?.coeff(k as usize))
    }

    /// Exact `P_n(x)`.
    pub fn eval(&self, n: u64, x: &BigRational) -> Result<BigRational> {
        Ok(self.get(n)?.eval(x))
    }
}

/// Closed form of `A_{n, n-m}` for `m <= 3` in terms of `g(2), g(3), g(4)`.
/// Returns `None` for larger `m`.
pub fn top_coefficient_closed_form(
    g2: &BigRational,
    g3: &BigRational,
    g4: &BigRational,
    n: u64,
    m: u64,
) -> Option<BigRational> {
    let c = |k: u64| BigRational::from_integer(binomial(n, k));
    let int = |k: i64| BigRational::from_integer(BigInt::from(k));
    let bracket = match m {
        0 => BigRational::one(),
        1 => g2 * c(2),
        2 => int(3) * g2 * g2 * c(4) + int(2) * g3 * c(3),
        3 => int(15) * g2 * g2 * g2 * c(6) + int(20) * g2 * g3 * c(5) + int(6) * g4 * c(4),
        _ => return None,
    };
    Some(bracket / BigRational::from_integer(factorial(n)))
}

/// `P_n(x)` at a fixed rational `x = p/q`, built by the same recurrence on
/// values. This is the only affordable route for scans to large `n`.
///
/// Values are kept as integers `Q_n = n! s^n P_n(x)` with `s = q G`, where
/// `G` clears the denominators of `g`. Then
/// `Q_n = p Σ_{k=1}^{n} h(k) s^{k-1} (n-1)!/(n-k)! Q_{n-k}` with `h = G g`,
/// and no fraction is ever reduced.
#[derive(Debug, Clone)]
pub struct ValueSequence {
    x: BigRational,
    g_den: BigInt,
    scale: BigInt,
    scaled: Vec<BigInt>,
    scale_pows: Vec<BigInt>,
}

impl PartialEq for ValueSequence {
    fn eq(&self, o: &Self) -> bool {
        self.x == o.x && self.g_den == o.g_den && self.scaled == o.scaled
    }
}

impl Eq for ValueSequence {}

/// Sign of a rational or integer quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_int(v: &BigInt) -> Self {
        match v.sign() {
            num_bigint::Sign::Minus => Sign::Negative,
            num_bigint::Sign::NoSign => Sign::Zero,
            num_bigint::Sign::Plus => Sign::Positive,
        }
    }

    pub fn of(v: &BigRational) -> Self {
        Self::of_int(v.numer())
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Negative => '-',
            Sign::Zero => '0',
            Sign::Positive => '+',
        }
    }
}

impl ValueSequence {
    /// `g_den` must be a positive common denominator of every `g(k)` that
    /// will be supplied.
    pub fn new(x: BigRational, g_den: BigInt) -> Result<Self> {
        if !g_den.is_positive() {
            return Err(Error::InvalidArgument("denominator of g must be positive".into()));
        }
        let scale = x.denom() * &g_den;
        Ok(Self {
            x,
            g_den,
            scale,
            scaled: vec![BigInt::one()],
            scale_pows: vec![BigInt::one()],
        })
    }

    /// A sequence for `g` at `x`, with the denominator of `g` taken from its
    /// table when it has one.
    pub fn for_function(g: &ArithFn, x: &BigRational) -> Result<Self> {
        Self::new(x.clone(), g.common_denominator())
    }

    pub fn x(&self) -> &BigRational {
        &self.x
    }

    pub fn built_to(&self) -> u64 {
        (self.scaled.len() - 1) as u64
    }

    /// `Q_n = n! s^n P_n(x)`.
    pub fn scaled(&self, n: u64) -> Option<&BigInt> {
        self.scaled.get(n as usize)
    }

    pub fn get(&self, n: u64) -> Option<BigRational> {
        let q = self.scaled.get(n as usize)?;
        let den = factorial(n) * num_traits::pow(self.scale.clone(), n as usize);
        Some(BigRational::new(q.clone(), den))
    }

    pub fn values(&self) -> Vec<BigRational> {
        (0..=self.built_to()).map(|n| self.get(n).unwrap()).collect()
    }

    /// Sign of `P_n(x)^2 - P_{n-1}(x) P_{n+1}(x)`, once `P_{n+1}` is built.
    /// Equals the sign of `(n+1) Q_n^2 - n Q_{n-1} Q_{n+1}`.
    pub fn delta_sign(&self, n: u64) -> Option<Sign> {
        if n == 0 || n + 1 > self.built_to() {
            return None;
        }
        let i = n as usize;
        let lhs = &self.scaled[i] * &self.scaled[i] * BigInt::from(n + 1);
        let rhs = &self.scaled[i - 1] * &self.scaled[i + 1] * BigInt::from(n);
        Some(Sign::of_int(&(lhs - rhs)))
    }

    /// Extends to `P_{n_max}` given `g_values[k-1] = g(k)` for `k <= n_max`.
    pub fn extend_to(&mut self, g_values: &[BigRational], n_max: u64) -> Result<()> {
        if (g_values.len() as u64) < n_max {
            return Err(Error::OutOfRange(format!(
                "need g(1..={n_max}), got {} values",
                g_values.len()
            )));
        }
        if self.built_to() >= n_max {
            return Ok(());
        }
        let h: Vec<BigInt> = g_values[..n_max as usize]
            .iter()
            .map(|v| {
                let t = v * BigRational::from_integer(self.g_den.clone());
                if t.is_integer() {
                    Ok(t.to_integer())
                } else {
                    Err(Error::InvalidArgument(format!(
                        "g value {} is not a multiple of 1/{}",
                        format_rational(v),
                        self.g_den
                    )))
                }
            })
            .collect::<Result<_>>()?;
        let unit_scale = self.scale.is_one();
        while self.scale_pows.len() < n_max as usize {
            let next = self.scale_pows.last().unwrap() * &self.scale;
            self.scale_pows.push(next);
        }
        let p = self.x.numer().clone();
        while self.built_to() < n_max {
            let n = self.scaled.len();
            // a_j = h(j+1) s^j Q_{n-1-j}; S = a_0 + (n-1)(a_1 + (n-2)(a_2 + ...)).
            let term = |j: usize| -> BigInt {
                let hq = &h[j] * &self.scaled[n - 1 - j];
                if unit_scale {
                    hq
                } else {
                    hq * &self.scale_pows[j]
                }
            };
            let mut acc = term(n - 1);
            for j in (0..n - 1).rev() {
                acc *= n - 1 - j;
                acc += term(j);
            }
            self.scaled.push(acc * &p);
        }
        Ok(())
    }

    /// Rough heap footprint of the stored values.
    pub fn approx_bytes(&self) -> usize {
        self.scaled
            .iter()
            .chain(&self.scale_pows)
            .map(|v| (v.bits() / 8) as usize + 32)
            .sum()
    }

    /// Serializable snapshot: `x`, the denominator of `g`, and the scaled
    /// integers `Q_n` as decimal strings.
    pub fn snapshot(&self) -> ValueSnapshot {
        ValueSnapshot {
            x: format_rational(&self.x),
            g_den: self.g_den.to_string(),
            scaled: self.scaled.iter().map(|v| v.to_string()).collect(),
        }
    }

    pub fn restore(snapshot: &ValueSnapshot) -> Result<Self> {
        let x = parse_rational(&snapshot.x)?;
        let parse_int = |s: &str| {
            s.parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
        };
        let mut seq = Self::new(x, parse_int(&snapshot.g_den)?)?;
        let scaled = snapshot
            .scaled
            .iter()
            .map(|v| parse_int(v))
            .collect::<Result<Vec<_>>>()?;
        if scaled.first().is_none_or(|v| !v.is_one()) {
            return Err(Error::Parse("snapshot must start with P_0 = 1".into()));
        }
        seq.scaled = scaled;
        Ok(seq)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueSnapshot {
    pub x: String,
    pub g_den: String,
    pub scaled: Vec<String>,
}

/// Convenience: `[P_0(x), ..., P_{n_max}(x)]`.
pub fn values_at(g: &ArithFn, x: &BigRational, n_max: u64) -> Result<Vec<BigRational>> {
    let gv = g.prefix(n_max)?;
    let mut seq = ValueSequence::for_function(g, x)?;
    seq.extend_to(&gv, n_max)?;
    Ok(seq.values())
}

/// `P_n(x)` from the composition formula, summed over partitions of `n`:
/// a partition with part multiplicities `c_m` and `k = Σ c_m` parts stands
/// for `k! / Π c_m!` ordered compositions, so it contributes
/// `x^k Π_m (g(m)/m)^{c_m} / c_m!`.
pub fn composition_oracle(g: &ArithFn, n: u64, x: &BigRational) -> Result<BigRational> {
    if n > PARTITION_ORACLE_MAX_N {
        return Err(Error::CostLimit(format!(
            "composition oracle enumerates every partition of n; n = {n} exceeds {PARTITION_ORACLE_MAX_N}"
        )));
    }
    if n == 0 {
        return Ok(BigRational::one());
    }
    let gv = g.prefix(n)?;
    let ratios: Vec<BigRational> = gv
        .iter()
        .enumerate()
        .map(|(i, v)| v / BigRational::from_integer(BigInt::from(i + 1)))
        .collect();
    let mut total = BigRational::zero();
    // (remaining, largest allowed part, parts so far, weight so far)
    let mut stack: Vec<(u64, u64, u32, BigRational)> = vec![(n, n, 0, BigRational::one())];
    while let Some((rest, max_part, parts, weight)) = stack.pop() {
        if rest == 0 {
            total += weight * x.pow(parts as i32);
            continue;
        }
        for m in 1..=max_part.min(rest) {
            // Take c copies of part m, then only smaller parts.
            let mut w = weight.clone();
            let mut c = 0u64;
            while (c + 1) * m <= rest {
                c += 1;
                w = w * &ratios[(m - 1) as usize] / BigRational::from_integer(BigInt::from(c));
                stack.push((rest - c * m, m - 1, parts + c as u32, w.clone()));
            }
        }
    }
    Ok(total)
}

/// The composition formula summed literally over ordered compositions
/// `m_1 + ... + m_k = n` with weight `1/k!`.
pub fn composition_oracle_ordered(g: &ArithFn, n: u64, x: &BigRational) -> Result<BigRational> {
    if n > ORDERED_ORACLE_MAX_N {
        return Err(Error::CostLimit(format!(
            "ordered composition oracle visits 2^(n-1) compositions; n = {n} exceeds {ORDERED_ORACLE_MAX_N}"
        )));
    }
    if n == 0 {
        return Ok(BigRational::one());
    }
    let gv = g.prefix(n)?;
    let mut total = BigRational::zero();
    // Bit i of `cuts` set means a part boundary after position i + 1.
    for cuts in 0u64..(1u64 << (n - 1)) {
        let mut product = BigRational::one();
        let mut start = 0u64;
        let mut k = 0u64;
        for pos in 1..=n {
            if pos == n || cuts & (1 << (pos - 1)) != 0 {
                let m = pos - start;
                product = product * &gv[(m - 1) as usize] / BigRational::from_integer(BigInt::from(m));
                start = pos;
                k += 1;
            }
        }
        total += product * x.pow(k as i32) / BigRational::from_integer(factorial(k));
    }
    Ok(total)
}

/// `P_0, ..., P_order` read off `Σ P_n(x) q^n = exp(x Σ_{n>=1} g(n) q^n / n)`,
/// computed independently of the recurrence.
pub fn exp_series_oracle(g: &ArithFn, order: u64) -> Result<Vec<RationalPoly>> {
    let gv = g.prefix(order)?;
    let mut inner = vec![RationalPoly::zero()];
    inner.extend(gv.iter().enumerate().map(|(i, v)| {
        RationalPoly::monomial(v / BigRational::from_integer(BigInt::from(i + 1)), 1)
    }));
    let e = series_exp(&TruncatedSeries::from_coeffs(inner, order as usize))?;
    Ok(e.coeffs().to_vec())
}

/// True when every `A_{n,k}` of the built sequence is non-negative.
pub fn coefficients_nonnegative(seq: &PolySequence) -> bool {
    seq.polys()
        .iter()
        .all(|p| p.coeffs().iter().all(|c| !c.is_negative()))
}
