//! Finite-`N` checks of the generalized Mertens formulas.
//!
//! Each experiment returns plain records ([`ConvergenceRow`], [`KsReport`],
//! [`WilliamsFit`], [`IdentityCheck`]) that serialize directly to CSV or JSON.
//! Pass/fail tolerances live in [`bands`].

pub mod bands;
mod identity;
mod ks;
mod mertens;

pub use identity::{corollary_fixed_n_check, identity_check, FixedNReport, IdentityCheck, IDENTITY_MAX_TERMS};
pub use ks::{ks_statistic, ks_test, KsReport, KS_MIN_SAMPLES};
pub use mertens::{
    mertens_ratio_table, totient_harmonic_ratio, williams_slope, DenominatorCut, MertensVariant,
    TotientMode, WilliamsFit, WilliamsPoint,
};

use serde::Serialize;

use crate::arith::Value;

/// One `(N, lhs, rhs, ratio, target)` line of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: u64,
    pub lhs: Value,
    pub rhs: Value,
    pub ratio: f64,
    pub target: f64,
    pub gap: f64,
}

impl ConvergenceRow {
    pub fn new(n: u64, lhs: Value, rhs: Value, target: f64) -> Self {
        let ratio = lhs.to_f64() / rhs.to_f64();
        ConvergenceRow { n, lhs, rhs, ratio, target, gap: (ratio - target).abs() }
    }

    /// `|ratio − target| / target`.
    pub fn relative_gap(&self) -> f64 {
        self.gap / self.target.abs()
    }
}

/// Final gap strictly below the first; the trend check used for ratio tables.
pub fn gap_shrinks(rows: &[ConvergenceRow]) -> bool {
    match (rows.first(), rows.last()) {
        (Some(a), Some(b)) if rows.len() >= 2 => b.gap < a.gap,
        _ => false,
    }
}
