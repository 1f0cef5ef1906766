use alloc::vec::Vec;

use super::Basis;
use crate::math::EXP_LIMIT;
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Largest number of lattice points enumerated by [`approximation_numbers`].
pub const ENUMERATION_BUDGET: usize = 20_000_000;

pub(crate) fn gevrey_norm(coeffs: &[f64], basis: &Basis, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::param("alpha", "must be finite and nonnegative"));
    }
    // log of each weighted term, then a scaled sum
    let mut logs = Vec::with_capacity(coeffs.len());
    for (p, (&c, mu)) in coeffs.iter().zip(basis.eigenvalues()).enumerate() {
        if c == 0.0 {
            continue;
        }
        let exponent = alpha * mu;
        if exponent > EXP_LIMIT {
            return Err(Error::GevreyRange {
                mode: p,
                exponent,
                limit: EXP_LIMIT,
            });
        }
        logs.push(exponent + c.abs().ln());
    }
    let Some(top) = logs.iter().copied().reduce(f64::max) else {
        return Ok(0.0);
    };
    let s: f64 = logs.iter().map(|l| (2.0 * (l - top)).exp()).sum();
    let value = top.exp() * s.sqrt();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::GevreyRange {
            mode: coeffs.len() - 1,
            exponent: top,
            limit: EXP_LIMIT,
        })
    }
}

fn check_args(alpha: f64, q_exp: f64, d: usize, n_max: usize) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::param("alpha", "must be positive"));
    }
    if !(q_exp > 0.0) || !q_exp.is_finite() {
        return Err(Error::param("q_exp", "must be positive"));
    }
    if d == 0 {
        return Err(Error::param("d", "must be at least 1"));
    }
    if n_max == 0 {
        return Err(Error::param("n_max", "must be at least 1"));
    }
    Ok(())
}

/// Squared Euclidean norms of every lattice point in `[-r, r]^d`.
fn box_norms(d: usize, r: i64) -> Vec<u64> {
    let side = (2 * r + 1) as usize;
    let total = side.pow(d as u32);
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rest = idx;
        let mut s = 0u64;
        for _ in 0..d {
            let k = (rest % side) as i64 - r;
            rest /= side;
            s += (k * k) as u64;
        }
        out.push(s);
    }
    out.sort_unstable();
    out
}

fn box_size(d: usize, r: i64) -> Option<usize> {
    ((2 * r + 1) as usize).checked_pow(d as u32)
}

fn weights(norms: &[u64], alpha: f64, q_exp: f64, n_max: usize) -> Vec<f64> {
    norms[..n_max]
        .iter()
        .map(|&s| (-alpha * (s as f64).sqrt().powf(q_exp)).exp())
        .collect()
}

/// The `n_max` largest values of `exp(-α ‖k‖₂^q)` over `k ∈ Z^d`, in
/// nonincreasing order.
///
/// The enumeration box `[-R, R]^d` grows until the ball `‖k‖₂ ≤ R` (which it
/// contains) already holds `n_max` points; every point outside the ball has a
/// strictly smaller weight, so the result is exact.
pub fn approximation_numbers(alpha: f64, q_exp: f64, d: usize, n_max: usize) -> Result<Vec<f64>> {
    check_args(alpha, q_exp, d, n_max)?;
    let mut r: i64 = 1;
    loop {
        let size = box_size(d, r).unwrap_or(usize::MAX);
        if size > ENUMERATION_BUDGET {
            return Err(Error::EnumerationBudget {
                needed: size,
                budget: ENUMERATION_BUDGET,
            });
        }
        let norms = box_norms(d, r);
        let in_ball = norms.partition_point(|&s| s <= (r * r) as u64);
        if in_ball >= n_max {
            return Ok(weights(&norms, alpha, q_exp, n_max));
        }
        r *= 2;
    }
}

/// Same as [`approximation_numbers`] but over the fixed box `[-radius, radius]^d`.
///
/// Meant for checking box invariance; the values are exact only once the box
/// contains the relevant ball.
pub fn approximation_numbers_in_box(
    alpha: f64,
    q_exp: f64,
    d: usize,
    n_max: usize,
    radius: usize,
) -> Result<Vec<f64>> {
    check_args(alpha, q_exp, d, n_max)?;
    let r = radius as i64;
    let size = box_size(d, r).unwrap_or(usize::MAX);
    if size > ENUMERATION_BUDGET {
        return Err(Error::EnumerationBudget {
            needed: size,
            budget: ENUMERATION_BUDGET,
        });
    }
    if size < n_max {
        return Err(Error::EnumerationBudget {
            needed: n_max,
            budget: size,
        });
    }
    Ok(weights(&box_norms(d, r), alpha, q_exp, n_max))
}
