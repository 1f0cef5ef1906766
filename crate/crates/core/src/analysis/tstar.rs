use alloc::format;

use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Root `t^ε ∈ (0, 1)` of `t = γ^{-C1 t}`, i.e. of `log t + C1 log γ · t = 0`.
///
/// Bisection runs until both the bracket width and `|f|` fall below `tol`.
/// The root is checked against `t^ε < (C1 log γ)^{-1/2}`.
pub fn tstar_solve(c1: f64, log_gamma: f64, tol: f64) -> Result<f64> {
    if !(c1 > 0.0) {
        return Err(Error::param("C1", "must be positive"));
    }
    if !(log_gamma > 0.0) || !log_gamma.is_finite() {
        return Err(Error::param("gamma", "γ must exceed 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    let c = c1 * log_gamma;
    let f = |t: f64| t.ln() + c * t;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut mid = 0.5;
    for _ in 0..2000 {
        mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v.abs() < tol && hi - lo < tol {
            break;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid {
            break;
        }
    }
    let cap = c.sqrt().recip();
    if !(mid < cap) {
        return Err(Error::Precondition(format!(
            "root {mid} is not below (C1 log γ)^(-1/2) = {cap}"
        )));
    }
    Ok(mid)
}
