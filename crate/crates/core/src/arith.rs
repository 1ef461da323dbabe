//! Normalized arithmetic functions and the double sequences built from them.
//!
//! The families used throughout are `σ_d(n) = Σ_{ℓ | n} ℓ^d`,
//! `ψ_d(n) = n^d` and the identity `id = ψ_1`. Arbitrary functions can be
//! supplied as finite tables. All values are exact rationals.

use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::{Error, Result};

/// Smallest-prime-factor sieve.
#[derive(Debug, Clone)]
pub struct Sieve {
    spf: Vec<u32>,
}

impl Sieve {
    pub fn new(limit: u64) -> Self {
        let limit = limit.max(1) as usize;
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Self { spf }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    /// Prime factorization as `(p, e)` pairs in increasing `p`. Falls back to
    /// trial division above the sieve limit.
    pub fn factorize(&self, n: u64) -> Vec<(u64, u32)> {
        assert!(n >= 1, "factorize needs n >= 1");
        if n > self.limit() {
            return factorize(n);
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as u64;
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
            m /= p as usize;
        }
        out
    }
}

/// Prime factorization by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorize needs n >= 1");
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn sigma_from_factors(d: u32, factors: &[(u64, u32)]) -> BigInt {
    factors.iter().fold(BigInt::one(), |acc, &(p, e)| {
        let pd = BigInt::from(p).pow(d);
        // 1 + p^d + p^{2d} + ... + p^{ed}
        let mut local = BigInt::one();
        let mut power = BigInt::one();
        for _ in 0..e {
            power *= &pd;
            local += &power;
        }
        acc * local
    })
}

/// `σ_d(n)`, the sum of the `d`-th powers of the divisors of `n`.
pub fn sigma(d: u32, n: u64) -> BigInt {
    sigma_from_factors(d, &factorize(n))
}

/// `ψ_d(n) = n^d`.
pub fn psi(d: u32, n: u64) -> BigInt {
    BigInt::from(n).pow(d)
}

fn moebius_from_factors(factors: &[(u64, u32)]) -> i8 {
    if factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The Möbius function.
pub fn moebius(n: u64) -> i8 {
    moebius_from_factors(&factorize(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Sigma(u32),
    Psi(u32),
    Identity,
    Table,
}

/// A normalized arithmetic function `g` with `g(1) = 1`.
///
/// Values are memoized; the memo is behind a lock so a shared `ArithFn` can be
/// queried from several threads.
pub struct ArithFn {
    kind: Kind,
    label: String,
    table: Option<Arc<[BigRational]>>,
    memo: RwLock<Vec<BigRational>>,
}

impl Clone for ArithFn {
    fn clone(&self) -> Self {
        Self {
            kind: self.kind.clone(),
            label: self.label.clone(),
            table: self.table.clone(),
            memo: RwLock::new(self.memo.read().expect("memo lock").clone()),
        }
    }
}

impl fmt::Debug for ArithFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArithFn")
            .field("kind", &self.kind)
            .field("label", &self.label)
            .finish()
    }
}

impl ArithFn {
    fn with_kind(kind: Kind, label: String) -> Self {
        Self {
            kind,
            label,
            table: None,
            memo: RwLock::new(Vec::new()),
        }
    }

    pub fn sigma(d: u32) -> Self {
        Self::with_kind(Kind::Sigma(d), format!("sigma:{d}"))
    }

    pub fn psi(d: u32) -> Self {
        Self::with_kind(Kind::Psi(d), format!("psi:{d}"))
    }

    pub fn identity() -> Self {
        Self::with_kind(Kind::Identity, "id".into())
    }

    /// Table-backed function with `values[k - 1] = g(k)` for `1 <= k <= len`.
    pub fn table(label: impl Into<String>, values: Vec<BigRational>) -> Result<Self> {
        match values.first() {
            None => Err(Error::InvalidArgument("empty arithmetic-function table".into())),
            Some(v) if !v.is_one() => Err(Error::NotNormalized(crate::rational::format_rational(v))),
            Some(_) => {
                let table: Arc<[BigRational]> = values.into();
                Ok(Self {
                    kind: Kind::Table,
                    label: label.into(),
                    memo: RwLock::new(table.to_vec()),
                    table: Some(table),
                })
            }
        }
    }

    /// Parses `sigma:d`, `psi:d` or `id`. Tables are built with [`ArithFn::table`].
    pub fn from_spec(spec: &str) -> Result<Self> {
        let exponent = |d: &str| {
            d.parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad exponent `{d}` in `{spec}`")))
        };
        match spec.split_once(':') {
            Some(("sigma", d)) => Ok(Self::sigma(exponent(d)?)),
            Some(("psi", d)) => Ok(Self::psi(exponent(d)?)),
            None if spec == "id" => Ok(Self::identity()),
            _ => Err(Error::Parse(format!(
                "unknown arithmetic function `{spec}` (expected sigma:d, psi:d, id or table:path)"
            ))),
        }
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The exponent `d` for the power families.
    pub fn exponent(&self) -> Option<u32> {
        match self.kind {
            Kind::Sigma(d) | Kind::Psi(d) => Some(d),
            Kind::Identity => Some(1),
            Kind::Table => None,
        }
    }

    /// Number of values available, `None` when unbounded.
    pub fn defined_up_to(&self) -> Option<u64> {
        self.table.as_ref().map(|t| t.len() as u64)
    }

    /// Positive common denominator of all values: 1 for the integer-valued
    /// families, the lcm of the table denominators otherwise.
    pub fn common_denominator(&self) -> BigInt {
        match &self.table {
            None => BigInt::one(),
            Some(t) => t
                .iter()
                .fold(BigInt::one(), |acc, v| num_integer::Integer::lcm(&acc, v.denom())),
        }
    }

    fn compute_range(&self, from: u64, to: u64) -> Vec<BigRational> {
        let sieve = matches!(self.kind, Kind::Sigma(_)).then(|| Sieve::new(to));
        (from..=to)
            .map(|n| {
                let v = match self.kind {
                    Kind::Sigma(d) => sigma_from_factors(d, &sieve.as_ref().unwrap().factorize(n)),
                    Kind::Psi(d) => psi(d, n),
                    Kind::Identity => BigInt::from(n),
                    Kind::Table => unreachable!("tables are fully memoized"),
                };
                BigRational::from_integer(v)
            })
            .collect()
    }

    fn check_range(&self, n: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::OutOfRange("arithmetic functions start at n = 1".into()));
        }
        if let Some(len) = self.defined_up_to() {
            if n > len {
                return Err(Error::TableRange {
                    label: self.label.clone(),
                    len,
                    n,
                });
            }
        }
        Ok(())
    }

    fn warm(&self, n: u64) {
        let have = self.memo.read().expect("memo lock").len() as u64;
        if have >= n {
            return;
        }
        let fresh = self.compute_range(have + 1, n);
        let mut memo = self.memo.write().expect("memo lock");
        let cur = memo.len() as u64;
        if cur < n {
            // Another writer may have extended the memo in between.
            memo.extend(fresh.into_iter().skip((cur - have) as usize));
        }
    }

    /// `g(n)`.
    pub fn value(&self, n: u64) -> Result<BigRational> {
        self.check_range(n)?;
        self.warm(n);
        Ok(self.memo.read().expect("memo lock")[(n - 1) as usize].clone())
    }

    /// `[g(1), ..., g(n)]`.
    pub fn prefix(&self, n: u64) -> Result<Vec<BigRational>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        self.check_range(n)?;
        self.warm(n);
        Ok(self.memo.read().expect("memo lock")[..n as usize].to_vec())
    }
}

/// Constructor for one member of a double sequence.
pub type FamilyFn = Arc<dyn Fn(u32) -> ArithFn + Send + Sync>;

/// A double sequence `{g_d(n)}`: one normalized arithmetic function per `d`.
#[derive(Clone)]
pub struct DoubleSequence {
    label: String,
    family: FamilyFn,
}

impl fmt::Debug for DoubleSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DoubleSequence").field("label", &self.label).finish()
    }
}

impl DoubleSequence {
    pub fn sigma() -> Self {
        Self::custom("sigma", Arc::new(ArithFn::sigma))
    }

    pub fn psi() -> Self {
        Self::custom("psi", Arc::new(ArithFn::psi))
    }

    pub fn custom(label: impl Into<String>, family: FamilyFn) -> Self {
        Self {
            label: label.into(),
            family,
        }
    }

    /// Parses `sigma` or `psi`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "sigma" => Ok(Self::sigma()),
            "psi" => Ok(Self::psi()),
            other => Err(Error::Parse(format!(
                "unknown family `{other}` (expected `sigma` or `psi`)"
            ))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn member(&self, d: u32) -> ArithFn {
        (self.family)(d)
    }
}

/// `f(n)` for `1 <= n <= N` where `n f(n) = Σ_{ℓ | n} μ(ℓ) g(n/ℓ)`; these are
/// the exponents in `∏ (1 - q^n)^{-x f(n)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductExponents {
    f: Vec<BigRational>,
}

impl ProductExponents {
    pub fn get(&self, n: u64) -> Option<&BigRational> {
        n.checked_sub(1).and_then(|i| self.f.get(i as usize))
    }

    pub fn len(&self) -> u64 {
        self.f.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn as_slice(&self) -> &[BigRational] {
        &self.f
    }
}

pub fn product_exponents(g: &ArithFn, n_max: u64) -> Result<ProductExponents> {
    let values = g.prefix(n_max)?;
    let sieve = Sieve::new(n_max);
    let f = (1..=n_max)
        .map(|n| {
            let mut acc = BigRational::zero();
            for (l, mu) in divisors_with_moebius(&sieve.factorize(n)) {
                if mu != 0 {
                    let term = &values[(n / l - 1) as usize];
                    if mu > 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
            }
            acc / BigRational::from_integer(BigInt::from(n))
        })
        .collect();
    Ok(ProductExponents { f })
}

/// Squarefree divisors with their Möbius sign; non-squarefree divisors carry
/// `μ = 0` and are skipped.
fn divisors_with_moebius(factors: &[(u64, u32)]) -> Vec<(u64, i8)> {
    let mut out = vec![(1u64, 1i8)];
    for &(p, _) in factors {
        let extra: Vec<_> = out.iter().map(|&(l, mu)| (l * p, -mu)).collect();
        out.extend(extra);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassDSide {
    /// `g_d(n) < n^d`.
    Lower,
    /// `g_d(n) - n^d > g_1(n) (n-1)^{d-1}`.
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassDViolation {
    pub d: u32,
    pub n: u64,
    pub side: ClassDSide,
}

/// Finite certificate for `0 <= g_d(n) - n^d <= g_1(n) (n-1)^{d-1}` on a grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassDReport {
    pub label: String,
    pub d_max: u32,
    pub n_max: u64,
    pub violation: Option<ClassDViolation>,
}

impl ClassDReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks the two-sided class inequality for `1 <= d <= d_max` and
/// `2 <= n <= n_max`, stopping at the first violation (ordered by `d`, then
/// `n`).
pub fn check_class_d(seq: &DoubleSequence, d_max: u32, n_max: u64) -> Result<ClassDReport> {
    if d_max == 0 || n_max == 0 {
        return Err(Error::InvalidArgument("d_max and n_max must be >= 1".into()));
    }
    let g1 = seq.member(1).prefix(n_max)?;
    let mut violation = None;
    'outer: for d in 1..=d_max {
        let gd = seq.member(d).prefix(n_max)?;
        for n in 2..=n_max {
            let diff = &gd[(n - 1) as usize] - BigRational::from_integer(psi(d, n));
            if diff.is_negative() {
                violation = Some(ClassDViolation {
                    d,
                    n,
                    side: ClassDSide::Lower,
                });
                break 'outer;
            }
            let cap = &g1[(n - 1) as usize] * BigRational::from_integer(psi(d - 1, n - 1));
            if diff > cap {
                violation = Some(ClassDViolation {
                    d,
                    n,
                    side: ClassDSide::Upper,
                });
                break 'outer;
            }
        }
    }
    Ok(ClassDReport {
        label: seq.label().to_string(),
        d_max,
        n_max,
        violation,
    })
}
