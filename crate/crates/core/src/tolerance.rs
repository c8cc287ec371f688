//! Numerical tolerances shared by every module.
//!
//! The algebraic tolerance (Hermiticity, unitarity, idempotency, commutation,
//! product form) is a process-wide setting so that a front end can override it
//! once. The other two are fixed.

use std::sync::atomic::{AtomicU64, Ordering};

/// Default max-entry tolerance for algebraic identities.
pub const DEFAULT_ALGEBRAIC: f64 = 1e-10;

/// Absolute gap below which neighbouring eigenvalues share one eigenspace.
pub const EIGEN_GROUPING: f64 = 1e-8;

/// Tolerance on probability sums and probability identities.
pub const PROBABILITY: f64 = 1e-12;

static ALGEBRAIC_BITS: AtomicU64 = AtomicU64::new(DEFAULT_ALGEBRAIC.to_bits());

/// Current algebraic tolerance.
pub fn algebraic() -> f64 {
    f64::from_bits(ALGEBRAIC_BITS.load(Ordering::Relaxed))
}

/// Overrides the algebraic tolerance for the whole process.
///
/// Non-finite or non-positive values are ignored and `false` is returned.
pub fn set_algebraic(tol: f64) -> bool {
    if !(tol.is_finite() && tol > 0.0) {
        return false;
    }
    ALGEBRAIC_BITS.store(tol.to_bits(), Ordering::Relaxed);
    true
}

/// Snapshot of the tolerance bundle, for report headers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceBundle {
    pub algebraic: f64,
    pub eigen_grouping: f64,
    pub probability: f64,
}

impl ToleranceBundle {
    pub fn current() -> Self {
        ToleranceBundle {
            algebraic: algebraic(),
            eigen_grouping: EIGEN_GROUPING,
            probability: PROBABILITY,
        }
    }
}
