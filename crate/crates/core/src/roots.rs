//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]`; `f(lo)` and `f(hi)` must differ in sign.
/// Stops once the bracket is narrower than `tol`.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::NumericalFailure(format!(
            "no sign change on [{lo}, {hi}]: f = {f_lo}, {f_hi}"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Number of sign changes of `f` sampled at `samples` evenly spaced points.
pub fn count_sign_changes<F>(mut f: F, lo: f64, hi: f64, samples: usize) -> usize
where
    F: FnMut(f64) -> f64,
{
    let mut prev: Option<f64> = None;
    let mut changes = 0;
    for i in 0..samples {
        let x = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        let v = f(x);
        if v == 0.0 || !v.is_finite() {
            continue;
        }
        if let Some(p) = prev {
            if p.signum() != v.signum() {
                changes += 1;
            }
        }
        prev = Some(v);
    }
    changes
}
