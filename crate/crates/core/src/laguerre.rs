//! Associated Laguerre polynomials `L_n^{(α)}` and the identities tying them
//! to `P_n^{ψ_1}`.

use num_rational::BigRational;
use num_traits::Signed;

use crate::arith::ArithFn;
use crate::exactpoly::{series_exp, RationalPoly, TruncatedSeries};
use crate::genpoly::build_sequence;
use crate::rational::{binomial_rational, factorial, int};
use crate::realroots::nonnegativity;
use crate::turan::delta;
use crate::{CheckReport, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LaguerreSeq {
    alpha: BigRational,
    polys: Vec<RationalPoly>,
}

impl LaguerreSeq {
    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn built_to(&self) -> u64 {
        self.polys.len() as u64 - 1
    }

    pub fn get(&self, n: u64) -> Result<&RationalPoly> {
        self.polys.get(n as usize).ok_or_else(|| {
            Error::OutOfRange(format!("L_{n} requested, built to {}", self.built_to()))
        })
    }

    pub fn polys(&self) -> &[RationalPoly] {
        &self.polys
    }
}

fn check_alpha(alpha: &BigRational) -> Result<()> {
    if *alpha <= int(-1) {
        return Err(Error::Domain(format!("Laguerre parameter must exceed -1, got {alpha}")));
    }
    Ok(())
}

/// `L_0, ..., L_N` from `(n+1) L_{n+1} = (2n + 1 + α - x) L_n - (n + α) L_{n-1}`.
pub fn build_laguerre(alpha: &BigRational, n_max: u64) -> Result<LaguerreSeq> {
    check_alpha(alpha)?;
    let mut polys = Vec::with_capacity(n_max as usize + 1);
    polys.push(RationalPoly::one());
    if n_max >= 1 {
        polys.push(RationalPoly::from_coeffs(vec![alpha + int(1), int(-1)]));
    }
    for n in 1..n_max {
        let nq = int(n as i64);
        let lin = RationalPoly::from_coeffs(vec![int(2) * &nq + int(1) + alpha, int(-1)]);
        let a = &lin * &polys[n as usize];
        let b = polys[n as usize - 1].scale(&(&nq + alpha));
        polys.push((&a - &b).scale(&(int(1) / (nq + int(1)))));
    }
    Ok(LaguerreSeq {
        alpha: alpha.clone(),
        polys,
    })
}

/// Coefficients of `(1-t)^{-(α+1)} exp(-x t / (1-t))` up to `t^order`, as
/// polynomials in `x`.
pub fn generating_function_series(alpha: &BigRational, order: usize) -> Result<TruncatedSeries<RationalPoly>> {
    check_alpha(alpha)?;
    let a = alpha + int(1);
    // (1-t)^{-a} = Σ C(a + k - 1, k) t^k
    let prefactor: Vec<RationalPoly> = (0..=order)
        .map(|k| RationalPoly::constant(binomial_rational(&(&a + int(k as i64) - int(1)), k as u64)))
        .collect();
    let mut exponent = vec![RationalPoly::zero()];
    exponent.extend((1..=order).map(|_| RationalPoly::from_ints(&[0, -1])));
    let e = series_exp(&TruncatedSeries::from_coeffs(exponent, order))?;
    Ok(TruncatedSeries::from_coeffs(prefactor, order).mul(&e))
}

/// Compares the recurrence with the generating-function expansion.
pub fn generating_function_check(alpha: &BigRational, n_max: u64) -> Result<CheckReport> {
    let seq = build_laguerre(alpha, n_max)?;
    let gf = generating_function_series(alpha, n_max as usize)?;
    let mut report = CheckReport::default();
    for n in 0..=n_max {
        report.record(n, gf.coeff(n as usize) == seq.get(n)?, "recurrence differs from generating function");
    }
    Ok(report)
}

/// `P_n^{ψ_1}(x) = (x/n) L_{n-1}^{(1)}(-x)` for `1 <= n <= N`.
pub fn identity_check(n_max: u64) -> Result<CheckReport> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("identity check needs N >= 1".into()));
    }
    let p = build_sequence(&ArithFn::identity(), n_max)?;
    let l = build_laguerre(&int(1), n_max - 1)?;
    let mut report = CheckReport::default();
    for n in 1..=n_max {
        let rhs = l.get(n - 1)?.reflect().shift_up(1).scale(&(int(1) / int(n as i64)));
        report.record(n, *p.get(n)? == rhs, "P_n differs from (x/n) L_{n-1}(-x)");
    }
    Ok(report)
}

fn turan_expression(l: &LaguerreSeq, n: u64) -> Result<RationalPoly> {
    let ln = l.get(n)?;
    Ok(&(ln * ln) - &(l.get(n - 1)? * l.get(n + 1)?))
}

/// `Σ_{k=0}^{n} C(α+n-1, n-k) / ((n+1) C(n,k)) · (L_k^{(α-1)})²`.
pub fn turan_sum(alpha: &BigRational, lower: &LaguerreSeq, n: u64) -> Result<RationalPoly> {
    let mut acc = RationalPoly::zero();
    for k in 0..=n {
        let w = binomial_rational(&(alpha + int(n as i64) - int(1)), n - k)
            / (int(n as i64 + 1) * binomial_rational(&int(n as i64), k));
        let lk = lower.get(k)?;
        acc = &acc + &(lk * lk).scale(&w);
    }
    Ok(acc)
}

/// `(L_n^{(α)})² - L_{n-1}^{(α)} L_{n+1}^{(α)}` against [`turan_sum`] for
/// `1 <= n <= N`; needs `α > 0` so that `α - 1 > -1`.
pub fn turan_sum_check(alpha: &BigRational, n_max: u64) -> Result<CheckReport> {
    if !alpha.is_positive() {
        return Err(Error::Domain("the sum identity needs alpha > 0".into()));
    }
    let l = build_laguerre(alpha, n_max + 1)?;
    let lower = build_laguerre(&(alpha - int(1)), n_max)?;
    let mut report = CheckReport::default();
    for n in 1..=n_max {
        let ok = turan_expression(&l, n)? == turan_sum(alpha, &lower, n)?;
        report.record(n, ok, "Turán expression differs from the weighted sum");
    }
    Ok(report)
}

/// For `2 <= n <= N`: (a) `Δ_n^{ψ_1}(x) = x²[(1/n²) L_{n-1}(-x)² -
/// (1/(n²-1)) L_{n-2}(-x) L_n(-x)]` with `L = L^{(1)}`, and (b) `Δ_n^{ψ_1}`
/// is nonnegative on the real line.
pub fn szego_delta_check(n_max: u64) -> Result<CheckReport> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("the normalized check needs N >= 2".into()));
    }
    let p = build_sequence(&ArithFn::identity(), n_max + 1)?;
    let l = build_laguerre(&int(1), n_max)?;
    let mut report = CheckReport::default();
    for n in 2..=n_max {
        let d = delta(&p, n)?.into_delta();
        let n2 = int((n * n) as i64);
        let a = l.get(n - 1)?.reflect();
        let b = &l.get(n - 2)?.reflect() * &l.get(n)?.reflect();
        let inner = &(&a * &a).scale(&(int(1) / &n2)) - &b.scale(&(int(1) / (&n2 - int(1))));
        report.record(n, d == inner.shift_up(2), "(a) normalized identity");
        report.record(n, nonnegativity(&d)?.nonnegative, "(b) nonnegativity");
    }
    Ok(report)
}

/// `L_n^{(0)}` against the classical `(n+1) L_{n+1} = (2n+1-x) L_n - n L_{n-1}`
/// and the explicit sum `Σ_k C(n,k) (-x)^k / k!`.
pub fn laguerre_zero_check(n_max: u64) -> Result<CheckReport> {
    let l = build_laguerre(&int(0), n_max)?;
    let mut report = CheckReport::default();
    for n in 0..=n_max {
        let coeffs: Vec<BigRational> = (0..=n)
            .map(|k| {
                let sign = if k % 2 == 0 { int(1) } else { int(-1) };
                sign * binomial_rational(&int(n as i64), k) / BigRational::from_integer(factorial(k))
            })
            .collect();
        report.record(n, RationalPoly::from_coeffs(coeffs) == *l.get(n)?, "L_n^(0) differs from the explicit sum");
    }
    for n in 1..n_max {
        let lhs = l.get(n + 1)?.scale(&int(n as i64 + 1));
        let lin = RationalPoly::from_coeffs(vec![int(2 * n as i64 + 1), int(-1)]);
        let rhs = &(&lin * l.get(n)?) - &l.get(n - 1)?.scale(&int(n as i64));
        report.record(n + 1, lhs == rhs, "classical recurrence fails");
    }
    Ok(report)
}
