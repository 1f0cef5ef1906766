use alloc::format;

use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Least-squares line `log err ≈ slope · log ε + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

/// Fit `err ∝ ε^slope` from at least three positive pairs.
pub fn fit_rate(eps: &[f64], err: &[f64]) -> Result<RateFit> {
    if eps.len() != err.len() {
        return Err(Error::DimensionMismatch {
            expected: eps.len(),
            found: err.len(),
        });
    }
    if eps.len() < 3 {
        return Err(Error::param(
            "points",
            format!("need at least 3, got {}", eps.len()),
        ));
    }
    if let Some(v) = eps
        .iter()
        .chain(err)
        .find(|v| !(**v > 0.0) || !v.is_finite())
    {
        return Err(Error::param(
            "points",
            format!("entries must be positive, got {v}"),
        ));
    }
    let xs: alloc::vec::Vec<f64> = eps.iter().map(|v| v.ln()).collect();
    let ys: alloc::vec::Vec<f64> = err.iter().map(|v| v.ln()).collect();
    fit_rate_logs(&xs, &ys)
}

/// Ordinary least squares on already-logged data.
pub fn fit_rate_logs(xs: &[f64], ys: &[f64]) -> Result<RateFit> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(Error::param("points", "need at least two matching pairs"));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::param("points", "abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    Ok(RateFit {
        slope,
        intercept,
        residual: (ss / nf).sqrt(),
    })
}

/// Composite trapezoid rule on possibly nonuniform abscissae.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    const EPS: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];

    #[test]
    fn exact_powers() {
        let f = fit_rate(&EPS, &EPS).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
        let sq: Vec<f64> = EPS.iter().map(|e| e.sqrt()).collect();
        assert!((fit_rate(&EPS, &sq).unwrap().slope - 0.5).abs() < 1e-12);
    }

    #[test]
    fn noisy_power() {
        let noise = [0.01, -0.01, 0.005, -0.008, 0.01];
        let ys: Vec<f64> = EPS
            .iter()
            .zip(noise)
            .map(|(e, n)| 3.0 * e.powf(0.7) * (1.0 + n))
            .collect();
        let f = fit_rate(&EPS, &ys).unwrap();
        assert!((f.slope - 0.7).abs() < 0.02);
        assert!((f.intercept - 3.0f64.ln()).abs() < 0.05);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_rate(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_rate(&[1.0, 0.0, 2.0], &[1.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn trapezoid_linear() {
        assert!((trapezoid(&[0.0, 0.5, 2.0], &[0.0, 0.5, 2.0]) - 2.0).abs() < 1e-15);
    }
}
