//! Error norms, a-priori error bounds, the `t^ε` rule, interpolation and
//! trace checks, rate fitting, and a weighted-energy (Carleman) inequality
//! check.

mod bounds;
mod carleman;
mod interp;
mod rate;
mod tstar;

pub use bounds::{cutoff_error_bound, error_bound, tstar_error_bound, BoundConstants};
pub use carleman::{
    carleman_check, carleman_sweep, CarlemanConfig, CarlemanReport, CarlemanSweep, SampledField,
    SeparableField, SpaceTimeField,
};
pub use interp::{gn_alpha, gn_check, lr_error, trace_check, GnCheck, TimeSeries, TraceCheck};
pub use rate::{fit_rate, fit_rate_logs, trapezoid, RateFit};
pub use tstar::tstar_solve;

use crate::basis::SpectralField;
use crate::Result;

/// `(‖u - v‖_{L²}, ‖∇(u - v)‖_{L²})`
pub fn error_norms(u: &SpectralField, v: &SpectralField) -> Result<(f64, f64)> {
    let d = u.sub(v)?;
    Ok((d.l2_norm(), d.h1_seminorm()))
}

/// One row of an error table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub eps: f64,
    pub gamma: f64,
    pub t: f64,
    pub err_l2: f64,
    /// `∫_t^T ‖∇(u^ε - u)‖² ds`
    pub err_h1_tail: f64,
    pub err_lr: f64,
    pub bound: f64,
    pub t_eps: f64,
}

impl ErrorRecord {
    pub fn is_valid(&self) -> bool {
        [
            self.eps,
            self.gamma,
            self.t,
            self.err_l2,
            self.err_h1_tail,
            self.err_lr,
            self.bound,
            self.t_eps,
        ]
        .iter()
        .all(|v| v.is_finite() && *v >= 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{Basis, BasisSpec, DomainKind};

    #[test]
    fn norm_examples() {
        let b = Basis::build(BasisSpec::interval(DomainKind::IntervalDirichlet, 4)).unwrap();
        let z = SpectralField::zeros(&b);
        assert_eq!(error_norms(&z, &z).unwrap(), (0.0, 0.0));
        let (l2, h1) = error_norms(&SpectralField::unit(&b, 0), &z).unwrap();
        assert!((l2 - 1.0).abs() < 1e-15 && (h1 - 1.0).abs() < 1e-15);
        let (l2, h1) = error_norms(&SpectralField::unit(&b, 1), &z).unwrap();
        assert!((l2 - 1.0).abs() < 1e-15 && (h1 - 2.0).abs() < 1e-15);
    }
}
