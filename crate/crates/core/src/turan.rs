//! `Δ_n = P_n^2 - P_{n-1} P_{n+1}`: exact polynomials, closed-form
//! coefficient checks, signs at rational points, exception scans and the
//! tables for the power family `ψ_d`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::ArithFn;
use crate::exactpoly::RationalPoly;
use crate::genpoly::{build_sequence, PolySequence, ValueSequence, ValueSnapshot};
use crate::rational::{factorial, format_rational, int, parse_rational};
use crate::realroots::nonnegativity;
use crate::{Error, Result};

pub use crate::genpoly::Sign;

/// `Δ_n` as an exact polynomial of degree `2n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuranPoly {
    n: u64,
    delta: RationalPoly,
}

impl TuranPoly {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn delta(&self) -> &RationalPoly {
        &self.delta
    }

    pub fn into_delta(self) -> RationalPoly {
        self.delta
    }

    /// `D_{n,k}`, the coefficient of `x^k`.
    pub fn coefficient(&self, k: usize) -> BigRational {
        self.delta.coeff(k)
    }

    /// Degree `2n`, leading coefficient `1/((n!)^2 (n+1))`, `D_{n,0} = 0` and
    /// `D_{n,1} = 0` for `n >= 2`. Returns the first violated property.
    pub fn structural_violation(&self) -> Option<&'static str> {
        let n = self.n;
        if self.delta.degree() != Some(2 * n as usize) {
            return Some("degree is not 2n");
        }
        if self.coefficient(2 * n as usize) != leading_coefficient(n) {
            return Some("leading coefficient is not 1/((n!)^2 (n+1))");
        }
        if !self.coefficient(0).is_zero() {
            return Some("constant term is not 0");
        }
        if n >= 2 && !self.coefficient(1).is_zero() {
            return Some("x^2 does not divide the polynomial");
        }
        None
    }
}

/// `D_{n,2n} = 1/((n!)^2 (n+1))`.
pub fn leading_coefficient(n: u64) -> BigRational {
    let f = factorial(n);
    BigRational::new(BigInt::one(), &f * &f * BigInt::from(n + 1))
}

pub fn delta(seq: &PolySequence, n: u64) -> Result<TuranPoly> {
    if n == 0 {
        return Err(Error::InvalidArgument("Δ_n needs n >= 1".into()));
    }
    if n + 1 > seq.built_to() {
        return Err(Error::OutOfRange(format!(
            "Δ_{n} needs P_{} but the sequence is built to {}",
            n + 1,
            seq.built_to()
        )));
    }
    let p = seq.get(n)?;
    let delta = p * p - seq.get(n - 1)? * seq.get(n + 1)?;
    Ok(TuranPoly { n, delta })
}

/// Closed forms of `Δ_1`, `Δ_2`, `Δ_3` in terms of `g(2)`, `g(3)`, `g(4)`.
pub fn delta_closed_form(n: u64, g2: &BigRational, g3: &BigRational, g4: &BigRational) -> Option<RationalPoly> {
    let r = |p: i64, q: i64| BigRational::new(BigInt::from(p), BigInt::from(q));
    let c = match n {
        1 => vec![BigRational::zero(), -g2 / int(2), r(1, 2)],
        2 => vec![
            BigRational::zero(),
            BigRational::zero(),
            (int(3) * g2 * g2 - int(4) * g3) / int(12),
            BigRational::zero(),
            r(1, 12),
        ],
        3 => vec![
            BigRational::zero(),
            BigRational::zero(),
            -g4 * g2 / int(8) + g3 * g3 / int(9),
            -g2 * g2 * g2 / int(16) + g3 * g2 / int(6) - g4 / int(8),
            g2 * g2 / int(16) - g3 / int(18),
            g2 / int(48),
            r(1, 144),
        ],
        _ => return None,
    };
    Some(RationalPoly::from_coeffs(c))
}

/// Compares `Δ_1`, `Δ_2`, `Δ_3` computed from the recurrence with their
/// closed forms.
pub fn low_delta_formula_check(g: &ArithFn) -> Result<bool> {
    let seq = build_sequence(g, 4)?;
    let (g2, g3, g4) = (g.value(2)?, g.value(3)?, g.value(4)?);
    for n in 1..=3 {
        if delta(&seq, n)?.delta != delta_closed_form(n, &g2, &g3, &g4).unwrap() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The `Δ_3` closed form alone.
pub fn delta3_formula_check(g: &ArithFn) -> Result<bool> {
    let seq = build_sequence(g, 4)?;
    let expected = delta_closed_form(3, &g.value(2)?, &g.value(3)?, &g.value(4)?).unwrap();
    Ok(delta(&seq, 3)?.delta == expected)
}

/// `D_{n,2} = (1/n^2) [g(n)^2 - n^2/(n^2-1) g(n-1) g(n+1)]`, `n >= 2`,
/// with `g[k-1] = g(k)`.
pub fn d2_closed_form(g: &[BigRational], n: u64) -> BigRational {
    let at = |k: u64| &g[k as usize - 1];
    let nn = BigRational::from_integer(BigInt::from(n * n));
    (at(n) * at(n) - &nn / (&nn - BigRational::one()) * at(n - 1) * at(n + 1)) / nn
}

/// The three-sum formula for `D_{n,3}`, `n >= 2`.
pub fn d3_closed_form(g: &[BigRational], n: u64) -> BigRational {
    let at = |k: u64| &g[k as usize - 1];
    let q = |k: u64| BigRational::from_integer(BigInt::from(k));
    let s1: BigRational = (1..n).map(|k| at(k) * at(n - k) / q(k)).sum();
    let s2: BigRational = (1..=n)
        .map(|k| at(n + 1 - k) * at(k) / (q(2) * q(n + 1 - k) * q(k)))
        .sum();
    let s3: BigRational = (1..=n.saturating_sub(2))
        .map(|k| at(n - 1 - k) * at(k) / (q(2) * q(n - 1 - k) * q(k)))
        .sum();
    q(2) * at(n) / q(n * n) * s1 - at(n - 1) / q(n - 1) * s2 - at(n + 1) / q(n + 1) * s3
}

/// Checks `D_{n,2}`, `D_{n,3}` and `D_{n,2n}` against their closed forms.
pub fn d_coefficients_check(seq: &PolySequence, n: u64) -> Result<bool> {
    if n < 2 {
        return Err(Error::InvalidArgument("the D_{n,k} formulas need n >= 2".into()));
    }
    let t = delta(seq, n)?;
    let g = seq.g_values();
    Ok(t.coefficient(2) == d2_closed_form(g, n)
        && t.coefficient(3) == d3_closed_form(g, n)
        && t.coefficient(2 * n as usize) == leading_coefficient(n))
}

/// Exact sign of `Δ_n(x)` from a built polynomial sequence.
pub fn sign_at(seq: &PolySequence, n: u64, x: &BigRational) -> Result<Sign> {
    if n == 0 || n + 1 > seq.built_to() {
        return Err(Error::OutOfRange(format!("Δ_{n} is not available")));
    }
    let p = seq.eval(n, x)?;
    let v = &p * &p - seq.eval(n - 1, x)? * seq.eval(n + 1, x)?;
    Ok(Sign::of(&v))
}

/// Exact sign of `Δ_n(x)` by the value recurrence, without polynomials.
pub fn sign_at_value_mode(g: &ArithFn, n: u64, x: &BigRational) -> Result<Sign> {
    if n == 0 {
        return Err(Error::InvalidArgument("Δ_n needs n >= 1".into()));
    }
    let mut v = ValueSequence::for_function(g, x)?;
    v.extend_to(&g.prefix(n + 1)?, n + 1)?;
    Ok(v.delta_sign(n).expect("built far enough"))
}

/// Indices `n <= N` with `Δ_n(x) < 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionReport {
    pub g: String,
    pub d: Option<u32>,
    pub x: String,
    #[serde(rename = "N")]
    pub n_max: u64,
    /// Largest `n` whose sign was decided; below `N` only when the scan
    /// stopped early.
    pub scanned_to: u64,
    pub exceptions: Vec<u64>,
    /// Set when the scan stopped after reaching the requested number of
    /// exceptions.
    pub stopped_early: bool,
    /// Optional per-`n` signs, one of `+`, `0`, `-` per index from 1.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub signs: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    /// Stop once this many exceptions are found.
    pub stop_after: Option<usize>,
    /// Checkpoint callback period, in values of `n`.
    pub checkpoint_every: u64,
    /// Abort with [`Error::Budget`] once the stored values exceed this.
    pub mem_budget: Option<usize>,
    pub record_signs: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            stop_after: None,
            checkpoint_every: 500,
            mem_budget: None,
            record_signs: false,
        }
    }
}

/// Resumable scan state, serialized with every big number as a string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanState {
    pub g: String,
    pub decided_to: u64,
    pub exceptions: Vec<u64>,
    pub signs: String,
    pub values: ValueSnapshot,
}

/// A sequential exception scan at a fixed `x` by the value recurrence.
#[derive(Debug, Clone)]
pub struct ExceptionScan {
    g: ArithFn,
    values: ValueSequence,
    decided_to: u64,
    exceptions: Vec<u64>,
    signs: String,
}

impl ExceptionScan {
    pub fn new(g: &ArithFn, x: &BigRational) -> Result<Self> {
        Ok(Self {
            g: g.clone(),
            values: ValueSequence::for_function(g, x)?,
            decided_to: 0,
            exceptions: Vec::new(),
            signs: String::new(),
        })
    }

    pub fn resume(g: &ArithFn, state: &ScanState) -> Result<Self> {
        if state.g != g.label() {
            return Err(Error::InvalidArgument(format!(
                "checkpoint is for `{}`, not `{}`",
                state.g,
                g.label()
            )));
        }
        let values = ValueSequence::restore(&state.values)?;
        if values.built_to() < state.decided_to + 1 && state.decided_to > 0 {
            return Err(Error::Parse("checkpoint holds too few values".into()));
        }
        Ok(Self {
            g: g.clone(),
            values,
            decided_to: state.decided_to,
            exceptions: state.exceptions.clone(),
            signs: state.signs.clone(),
        })
    }

    pub fn state(&self) -> ScanState {
        ScanState {
            g: self.g.label().to_string(),
            decided_to: self.decided_to,
            exceptions: self.exceptions.clone(),
            signs: self.signs.clone(),
            values: self.values.snapshot(),
        }
    }

    pub fn x(&self) -> &BigRational {
        self.values.x()
    }

    pub fn decided_to(&self) -> u64 {
        self.decided_to
    }

    pub fn exceptions(&self) -> &[u64] {
        &self.exceptions
    }

    /// Decides signs up to `n_max`, calling `checkpoint` every
    /// `opts.checkpoint_every` indices. Returns `true` if it stopped early.
    pub fn run(
        &mut self,
        n_max: u64,
        opts: &ScanOptions,
        mut checkpoint: impl FnMut(&ExceptionScan) -> Result<()>,
    ) -> Result<bool> {
        let step = opts.checkpoint_every.max(1);
        while self.decided_to < n_max {
            if opts.stop_after.is_some_and(|k| self.exceptions.len() >= k) {
                return Ok(true);
            }
            let target = (self.decided_to + step).min(n_max);
            let gv = self.g.prefix(target + 1)?;
            self.values.extend_to(&gv, target + 1)?;
            if let Some(budget) = opts.mem_budget {
                let used = self.values.approx_bytes();
                if used > budget {
                    return Err(Error::Budget { budget, needed: used });
                }
            }
            for n in self.decided_to + 1..=target {
                let s = self.values.delta_sign(n).expect("values built past n");
                self.signs.push(s.symbol());
                if s == Sign::Negative {
                    self.exceptions.push(n);
                }
                self.decided_to = n;
                if opts.stop_after.is_some_and(|k| self.exceptions.len() >= k) {
                    break;
                }
            }
            checkpoint(self)?;
        }
        Ok(opts.stop_after.is_some_and(|k| self.exceptions.len() >= k) && self.decided_to <= n_max)
    }

    pub fn report(&self, n_max: u64, stopped_early: bool, with_signs: bool) -> ExceptionReport {
        ExceptionReport {
            g: self.g.label().to_string(),
            d: self.g.exponent(),
            x: format_rational(self.values.x()),
            n_max,
            scanned_to: self.decided_to,
            exceptions: self.exceptions.clone(),
            stopped_early,
            signs: with_signs.then(|| self.signs.clone()),
        }
    }
}

/// All `n <= N` with `Δ_n(x) < 0`.
pub fn exceptions(g: &ArithFn, x: &BigRational, n_max: u64) -> Result<ExceptionReport> {
    exceptions_with(g, x, n_max, &ScanOptions::default())
}

pub fn exceptions_with(
    g: &ArithFn,
    x: &BigRational,
    n_max: u64,
    opts: &ScanOptions,
) -> Result<ExceptionReport> {
    let mut scan = ExceptionScan::new(g, x)?;
    let stopped = scan.run(n_max, opts, |_| Ok(()))?;
    Ok(scan.report(n_max, stopped, opts.record_signs))
}

/// Exception matrix for `ψ_d` at `x = 1`: `m[n-1][d-1]` is `Δ_n^{ψ_d}(1) < 0`.
pub fn table1(d_max: u32, n_max: u64) -> Result<Vec<Vec<bool>>> {
    let columns: Vec<Vec<bool>> = (1..=d_max)
        .into_par_iter()
        .map(|d| {
            let g = ArithFn::psi(d);
            let mut v = ValueSequence::for_function(&g, &BigRational::one())?;
            v.extend_to(&g.prefix(n_max + 1)?, n_max + 1)?;
            Ok((1..=n_max)
                .map(|n| v.delta_sign(n) == Some(Sign::Negative))
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..n_max as usize)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect())
}

/// One row of the `ψ_d` log-concavity summary at `x = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table2Row {
    pub d: u32,
    pub n_max: u64,
    pub exceptions: Vec<u64>,
    pub log_concave: String,
    pub strictly_log_convex: String,
}

fn braces(v: &[u64]) -> String {
    let items: Vec<String> = v.iter().map(u64::to_string).collect();
    format!("{{{}}}", items.join(","))
}

/// Renders an exception set `E` as the pair (log-concave, strictly
/// log-convex): `"n>m, {...}"` for the complement below `m = max E`, and
/// `"n=k"` or `"{...}"` for `E` itself.
pub fn describe_exceptions(e: &[u64]) -> (String, String) {
    let Some(&m) = e.iter().max() else {
        return ("n>0".into(), "{}".into());
    };
    let rest: Vec<u64> = (1..m).filter(|n| !e.contains(n)).collect();
    let concave = if rest.is_empty() {
        format!("n>{m}")
    } else {
        format!("n>{m}, {}", braces(&rest))
    };
    let convex = if e.len() == 1 {
        format!("n={}", e[0])
    } else {
        braces(e)
    };
    (concave, convex)
}

pub fn table2(d_max: u32, n_max: u64) -> Result<Vec<Table2Row>> {
    (1..=d_max)
        .into_par_iter()
        .map(|d| {
            let report = exceptions(&ArithFn::psi(d), &BigRational::one(), n_max)?;
            let (log_concave, strictly_log_convex) = describe_exceptions(&report.exceptions);
            Ok(Table2Row {
                d,
                n_max,
                exceptions: report.exceptions,
                log_concave,
                strictly_log_convex,
            })
        })
        .collect()
}

/// Certified global nonnegativity of `Δ_n^{ψ_d}` on the real line for
/// `2 <= n <= n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table3Row {
    pub d: u32,
    pub n_from: u64,
    pub n_to: u64,
    pub certified: bool,
    /// Indices where `Δ_n` takes a negative value, with a witness point.
    pub failures: Vec<(u64, String)>,
}

pub fn table3_row(d: u32, n_max: u64) -> Result<Table3Row> {
    let seq = build_sequence(&ArithFn::psi(d), n_max + 1)?;
    let mut failures: Vec<(u64, String)> = (2..=n_max)
        .into_par_iter()
        .map(|n| {
            let t = delta(&seq, n)?;
            let cert = nonnegativity(t.delta())?;
            Ok((!cert.nonnegative).then(|| {
                let w = cert.witness.as_ref().map(format_rational).unwrap_or_default();
                (n, w)
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    failures.sort();
    Ok(Table3Row {
        d,
        n_from: 2,
        n_to: n_max,
        certified: failures.is_empty(),
        failures,
    })
}

/// Parses the `x` of a report back to a rational.
pub fn report_x(report: &ExceptionReport) -> Result<BigRational> {
    parse_rational(&report.x)
}

/// True when some `x` in `samples` lies in `(0, g(2))` with `Δ_1(x) >= 0`.
pub fn delta1_interval_violation(g: &ArithFn, samples: &[BigRational]) -> Result<Option<BigRational>> {
    let g2 = g.value(2)?;
    let seq = build_sequence(g, 2)?;
    for x in samples {
        if x.is_positive() && *x < g2 && sign_at(&seq, 1, x)? != Sign::Negative {
            return Ok(Some(x.clone()));
        }
    }
    Ok(None)
}
