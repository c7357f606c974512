//! Validation of `(n, k, eps)` shared by the approximate solvers.

use crate::error::{Error, Result};

/// Checks `k >= 1`, `0 < eps < 2` and `(1+eps)k < n`. The last failure is
/// reported as [`Error::TrivialInstance`]: the full alignment already fits
/// the relaxed budget.
pub fn validate(n: usize, k: usize, eps: f64) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 2), got {eps}")));
    }
    let budget = (1.0 + eps) * k as f64;
    if budget >= n as f64 {
        return Err(Error::TrivialInstance { budget, n });
    }
    Ok(())
}

/// The integer mismatch allowance `floor((1+eps)k)`.
pub fn relaxed(k: usize, eps: f64) -> usize {
    ((1.0 + eps) * k as f64 + 1e-9).floor() as usize
}
