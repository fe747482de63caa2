//! Process-wide size limits and default tolerances.
//!
//! State spaces grow as the product of node alphabets, so every operation
//! that builds a matrix checks its output dimensions against a cap before
//! allocating anything.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

/// Default cap on any single matrix dimension (2^20).
pub const DEFAULT_DIMENSION_CAP: usize = 1 << 20;

/// Tolerance for algebraic identities in tests and comparisons.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Default tolerance for column-stochastic and simplex validation.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-9;

/// Drift beyond this is a modelling error rather than rounding.
pub const HARD_DRIFT_LIMIT: f64 = 1e-6;

static DIMENSION_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DIMENSION_CAP);

pub fn dimension_cap() -> usize {
    DIMENSION_CAP.load(Ordering::Relaxed)
}

/// Replace the process-wide dimension cap, returning the previous value.
pub fn set_dimension_cap(cap: usize) -> usize {
    DIMENSION_CAP.swap(cap.max(1), Ordering::Relaxed)
}

/// Checks a product of dimensions against the cap without overflowing.
pub(crate) fn check_dim(what: &'static str, factors: &[usize]) -> Result<usize> {
    let requested: u128 = factors.iter().map(|&f| f as u128).product();
    let cap = dimension_cap();
    if requested > cap as u128 {
        return Err(Error::DimensionCap {
            what,
            requested,
            cap,
        });
    }
    Ok(requested as usize)
}
