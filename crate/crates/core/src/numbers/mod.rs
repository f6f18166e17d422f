//! Exact real algebraic numbers and their Gaussian extension.

mod factor;
mod gaussian;
mod real;
mod roots;
pub mod zpoly;

use std::sync::atomic::{AtomicUsize, Ordering};

use thiserror::Error;

pub use factor::{factor_q, factor_z, is_irreducible};
pub use gaussian::GaussianAlgebraic;
pub use real::RealAlgebraic;
pub use roots::{nth_root_real, ralg_sign, real_roots, real_roots_distinct};
pub(crate) use real::rational_root_bounds;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("algebraic degree {degree} exceeds the configured limit {limit}")]
    DegreeLimit { degree: usize, limit: usize },
    #[error("zero polynomial has no root set")]
    ZeroPolynomial,
    #[error("interval ({lo}, {hi}) does not isolate exactly one real root (found {count})")]
    NotIsolating { lo: String, hi: String, count: usize },
}

static DEGREE_LIMIT: AtomicUsize = AtomicUsize::new(64);

/// Largest algebraic degree any intermediate result may reach.
pub fn degree_limit() -> usize {
    DEGREE_LIMIT.load(Ordering::Relaxed)
}

pub fn set_degree_limit(limit: usize) {
    DEGREE_LIMIT.store(limit.max(2), Ordering::Relaxed);
}

pub(crate) fn check_degree(degree: usize) -> Result<(), NumberError> {
    let limit = degree_limit();
    if degree > limit {
        Err(NumberError::DegreeLimit { degree, limit })
    } else {
        Ok(())
    }
}
