use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::rate::trapezoid;
use crate::basis::{Basis, SpectralField};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Error fields `e(s)` at increasing times covering `[t, T]`.
#[derive(Debug, Clone, Copy)]
pub struct TimeSeries<'a> {
    pub times: &'a [f64],
    pub errors: &'a [SpectralField],
}

impl TimeSeries<'_> {
    fn validate(&self) -> Result<()> {
        if self.times.len() != self.errors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.times.len(),
                found: self.errors.len(),
            });
        }
        if self.times.len() < 2 {
            return Err(Error::param("times", "need at least two samples"));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("times", "must be strictly increasing"));
        }
        Ok(())
    }

    fn span(&self) -> f64 {
        self.times[self.times.len() - 1] - self.times[0]
    }

    fn sup_l2(&self) -> f64 {
        self.errors.iter().map(|e| e.l2_norm()).fold(0.0, f64::max)
    }

    /// `∫ ‖∇e‖² ds`
    fn grad_integral(&self) -> f64 {
        let g: Vec<f64> = self
            .errors
            .iter()
            .map(|e| e.h1_seminorm().powi(2))
            .collect();
        trapezoid(self.times, &g)
    }
}

/// Interpolation exponent from `1/r = α/2 + (1 - α)(d - 2)/(2d)`, i.e.
/// `α = d/r - (d - 2)/2`.
pub fn gn_alpha(r: f64, d: usize) -> Result<f64> {
    if !(r > 2.0) {
        return Err(Error::param("r", format!("need r > 2, got {r}")));
    }
    if d == 0 {
        return Err(Error::param("d", "must be at least 1"));
    }
    let df = d as f64;
    if !(1.0 / r > (df - 2.0) / (2.0 * df)) {
        return Err(Error::param("r", format!("r = {r} too large for d = {d}")));
    }
    let alpha = df / r - (df - 2.0) / 2.0;
    if alpha > 0.0 && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(Error::param("r", format!("α = {alpha} outside (0, 1)")))
    }
}

/// `‖e‖_{L^r}` evaluated by quadrature on `refined`, a basis with the same
/// modes as `e` and a finer grid.
pub fn lr_error(e: &SpectralField, r: f64, refined: &Arc<Basis>) -> Result<f64> {
    Ok(e.on_basis(refined)?.to_grid().lr_norm(r))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnCheck {
    pub alpha: f64,
    /// `∫_t^T ‖e‖_{L^r}² ds`
    pub lhs: f64,
    /// `(T - t)^α sup ‖e‖^{2α} (∫_t^T ‖∇e‖² ds)^{1-α}`
    pub rhs: f64,
    /// Smallest `C²` with `lhs ≤ C² rhs`.
    pub c_omega_sq: f64,
}

/// Measure the interpolation inequality on a run; `oversample` multiplies
/// the grid resolution used for the `L^r` integrals.
pub fn gn_check(series: TimeSeries<'_>, r: f64, oversample: usize) -> Result<GnCheck> {
    series.validate()?;
    let basis = series.errors[0].basis();
    let alpha = gn_alpha(r, basis.dim())?;
    let refined = basis.with_quadrature(basis.spec().quadrature_points * oversample.max(1))?;
    let lr_sq = series
        .errors
        .iter()
        .map(|e| lr_error(e, r, &refined).map(|v| v * v))
        .collect::<Result<Vec<f64>>>()?;
    let lhs = trapezoid(series.times, &lr_sq);
    let rhs = series.span().powf(alpha)
        * series.sup_l2().powf(2.0 * alpha)
        * series.grad_integral().powf(1.0 - alpha);
    let c_omega_sq = if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        return Err(Error::Precondition(format!(
            "right side vanishes while the left is {lhs}"
        )));
    };
    Ok(GnCheck {
        alpha,
        lhs,
        rhs,
        c_omega_sq,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceCheck {
    /// `∫_t^T ‖e‖²_{L²(∂Ω)} ds`
    pub lhs: f64,
    /// `sup ‖e‖² + ∫_t^T ‖∇e‖² ds`
    pub rhs: f64,
    /// Smallest constant making `lhs ≤ C rhs`.
    pub c_omega: f64,
}

/// Boundary-trace inequality measured on a run.
pub fn trace_check(series: TimeSeries<'_>) -> Result<TraceCheck> {
    series.validate()?;
    let basis = series.errors[0].basis();
    let traces: Vec<f64> = series
        .errors
        .iter()
        .map(|e| basis.boundary_l2_squared(e.coeffs()))
        .collect();
    let lhs = trapezoid(series.times, &traces);
    let rhs = series.sup_l2().powi(2) + series.grad_integral();
    let c_omega = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(TraceCheck { lhs, rhs, c_omega })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{BasisSpec, DomainKind};
    use alloc::vec;

    #[test]
    fn alpha_examples() {
        assert!((gn_alpha(4.0, 1).unwrap() - 0.75).abs() < 1e-15);
        assert!((gn_alpha(4.0, 3).unwrap() - 0.25).abs() < 1e-15);
        assert!((gn_alpha(4.0, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!(gn_alpha(2.0, 1).is_err());
        assert!(gn_alpha(6.0, 3).is_err());
        assert!(gn_alpha(2.0 + 1e-9, 1).unwrap() < 1.0);
    }

    #[test]
    fn lr_norm_of_sine() {
        // ∫_0^π (sqrt(2/π) sin x)^4 dx = (4/π²)(3π/8) = 3/(2π)
        let b = Basis::build(BasisSpec::interval(DomainKind::IntervalDirichlet, 8)).unwrap();
        let refined = b.with_quadrature(64).unwrap();
        let v = lr_error(&SpectralField::unit(&b, 0), 4.0, &refined).unwrap();
        let expect = (3.0 / (2.0 * core::f64::consts::PI)).powf(0.25);
        assert!((v - expect).abs() < 1e-12);
    }

    #[test]
    fn gn_constant_is_finite_and_positive() {
        let b = Basis::build(BasisSpec::interval(DomainKind::IntervalDirichlet, 16)).unwrap();
        let times: Vec<f64> = (0..=10).map(|i| 0.5 + 0.05 * i as f64).collect();
        let errors: Vec<SpectralField> = times
            .iter()
            .map(|t| {
                SpectralField::from_coeffs(
                    &b,
                    (0..16).map(|p| t / (1.0 + p as f64).powi(2)).collect(),
                )
                .unwrap()
            })
            .collect();
        let c = gn_check(
            TimeSeries {
                times: &times,
                errors: &errors,
            },
            4.0,
            4,
        )
        .unwrap();
        assert!(c.c_omega_sq > 0.0 && c.c_omega_sq.is_finite());
        assert!(c.lhs <= c.c_omega_sq * c.rhs * (1.0 + 1e-12));
    }

    #[test]
    fn trace_of_neumann_cosine() {
        let b = Basis::build(BasisSpec::interval(DomainKind::IntervalNeumann, 4)).unwrap();
        let times = vec![0.0, 1.0];
        let errors = vec![SpectralField::unit(&b, 1), SpectralField::unit(&b, 1)];
        let tc = trace_check(TimeSeries {
            times: &times,
            errors: &errors,
        })
        .unwrap();
        assert!((tc.lhs - 4.0 / core::f64::consts::PI).abs() < 1e-13);
        assert!((tc.rhs - 2.0).abs() < 1e-13);
    }
}
