//! Exact computation of the polynomials `P_n^g(x)` attached to normalized
//! arithmetic functions, their Turán expressions
//! `Δ_n^g(x) = P_n(x)^2 - P_{n-1}(x) P_{n+1}(x)`, and the machinery used to
//! study their signs: exception sets, residue-class bounds, explicit
//! thresholds in the exponent `d`, real-root certificates and the Laguerre
//! special case `g = id`.
//!
//! Everything that decides a sign or a set membership is computed over the
//! rationals. Floating point appears only in complex-root approximations for
//! figure data and in the informational `f64` views of thresholds.

pub mod arith;
pub mod bounds;
pub mod error;
pub mod exactpoly;
pub mod figures;
pub mod genpoly;
pub mod interval;
pub mod laguerre;
pub mod rational;
pub mod realroots;
pub mod turan;

pub use error::{Error, Result};

/// Outcome of an exact identity sweep: which indices were checked and which
/// failed.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct CheckReport {
    pub checked: Vec<u64>,
    pub failures: Vec<CheckFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CheckFailure {
    pub index: u64,
    pub what: String,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub(crate) fn record(&mut self, index: u64, ok: bool, what: impl Into<String>) {
        if !self.checked.contains(&index) {
            self.checked.push(index);
        }
        if !ok {
            self.failures.push(CheckFailure {
                index,
                what: what.into(),
            });
        }
    }
}
