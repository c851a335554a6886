//! Numerical certification of the search bounds.
//!
//! Each check returns a typed report; [`CheckRecord`] is the flattened form
//! collected into the JSON verification report. Inequalities are compared in
//! the log₂ domain, and a check passes when its margin is at least
//! `−2^−(p−32)`. That allowance only covers rounding in cases where the two
//! sides are equal in exact arithmetic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::CatalogError;
use crate::engine::EngineError;
use crate::numerics::{NumericsError, Real};
use crate::oracle::OracleError;

pub mod diff;
pub mod lower;
pub mod suite;
pub mod unknown_d;
pub mod upper;

pub use diff::{
    check_abel_decomposition, check_diff_bounds, check_diff_positivity, finite_difference, phi, DiffFunction,
    DiffOracle,
};
pub use lower::{
    beck_newman_check, check_lower_bound_family, check_product_sandwich, refute_polynomial_bound, BeckNewmanState,
    RefutationWitness,
};
pub use suite::{run_suite, Suite, SuiteOptions, VerificationReport};
pub use unknown_d::{check_unknown_d_bound, UnknownDReport};
pub use upper::{check_upper_bound, BoundSpec, UpperBoundReport};

/// Bits of precision given up to rounding before a margin counts as negative.
pub const ROUNDING_SLACK_BITS: i64 = 32;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("target {0} not caught by the trajectory")]
    NotCaught(String),
}

pub(crate) fn precondition(msg: impl Into<String>) -> VerifyError {
    VerifyError::Precondition(msg.into())
}

/// Smallest admissible margin at precision `p`.
pub fn rounding_slack(p: usize) -> Real {
    Real::pow2(-(p as i64 - ROUNDING_SLACK_BITS), p)
}

/// `margin ≥ −2^−(p−32)`.
pub fn certified(margin: &Real) -> bool {
    *margin >= -rounding_slack(margin.precision())
}

/// `log₂(b) − log₂(a)` for positive `a ≤ b` checks.
pub(crate) fn log2_margin(smaller: &Real, larger: &Real) -> Real {
    larger.log2() - smaller.log2()
}

/// One line of the verification report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub params: BTreeMap<String, String>,
    /// `null` for identity and sign checks that have no ratio to report.
    pub margin_log2: Option<f64>,
    pub pass: bool,
    pub precision_bits: usize,
}

impl CheckRecord {
    pub fn new(check_id: impl Into<String>, precision_bits: usize) -> Self {
        CheckRecord { check_id: check_id.into(), params: BTreeMap::new(), margin_log2: None, pass: false, precision_bits }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Sets the margin and derives `pass` from it.
    pub fn margin(mut self, margin: &Real) -> Self {
        self.margin_log2 = Some(margin.to_f64());
        self.pass = certified(margin);
        self
    }

    pub fn passed(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }
}
