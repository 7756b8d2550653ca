//! Process-wide guard against runaway term growth in exact arithmetic.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Default cap on the number of terms of any intermediate substitution result.
pub const DEFAULT_MAX_TERMS: usize = 1_000_000;

static MAX_TERMS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_TERMS);

pub fn set_max_terms(limit: usize) {
    MAX_TERMS.store(limit, Ordering::Relaxed);
}

pub fn max_terms() -> usize {
    MAX_TERMS.load(Ordering::Relaxed)
}

pub(crate) fn check_terms(p: &Polynomial) -> Result<()> {
    let limit = max_terms();
    if p.len() > limit {
        return Err(Error::ResourceCap(format!("{} terms exceed the limit of {limit}", p.len())));
    }
    Ok(())
}

/// Default number of degree enlargements an adaptive solve may attempt.
pub const DEFAULT_MAX_DEGREE_GROWTH: usize = 8;

static MAX_DEGREE_GROWTH: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_DEGREE_GROWTH);

pub fn set_max_degree_growth(limit: usize) {
    MAX_DEGREE_GROWTH.store(limit, Ordering::Relaxed);
}

pub fn max_degree_growth() -> usize {
    MAX_DEGREE_GROWTH.load(Ordering::Relaxed)
}

/// Default cap on the dimension of a truncated space used by the linear
/// solvers. Exact elimination cost grows roughly quadratically in the
/// dimension; at this size a solve takes tens of seconds.
pub const DEFAULT_MAX_DIMENSION: usize = 20_000;

static MAX_DIMENSION: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_DIMENSION);

pub fn set_max_dimension(limit: usize) {
    MAX_DIMENSION.store(limit, Ordering::Relaxed);
}

pub fn max_dimension() -> usize {
    MAX_DIMENSION.load(Ordering::Relaxed)
}
