use alloc::format;
use alloc::string::String;

use super::{BackwardRun, RegularizedProblem, RhoMode};
use crate::basis::{DomainKind, SpectralField};
#[allow(unused_imports)]
use num_traits::Float;

/// Nodal range of the scaled trajectory `v = e^{ρ(t - T)} u`, compared with
/// `[0, ‖u_f‖_∞]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    /// Set when a precondition fails; the range check is then not run.
    pub skipped: Option<String>,
    pub rho: f64,
    pub min: f64,
    pub max: f64,
    pub upper: f64,
    pub tol: f64,
    /// Stored times at which the range was left.
    pub violations: usize,
}

impl PositivityReport {
    pub fn passed(&self) -> bool {
        self.skipped.is_none() && self.violations == 0
    }
}

/// Audit positivity and boundedness of a backward run.
///
/// Preconditions: a basis that represents constants (Neumann or periodic),
/// `F(·, ·, 0) = 0`, and nonnegative nodal terminal data.
pub fn positivity_check(
    rp: &RegularizedProblem,
    run: &BackwardRun,
    u_f: &SpectralField,
) -> PositivityReport {
    let rho = rp.rho(RhoMode::Positivity);
    let grid = u_f.to_grid();
    let upper = grid.max_abs();
    let tol = 1e-6 * upper;
    let mut report = PositivityReport {
        skipped: None,
        rho,
        min: f64::NAN,
        max: f64::NAN,
        upper,
        tol,
        violations: 0,
    };
    let kind = rp.problem.basis.kind();
    if kind == DomainKind::IntervalDirichlet {
        report.skipped = Some(format!("{} basis cannot represent constants", kind.name()));
        return report;
    }
    if !rp.problem.source.vanishes_at_zero(u_f, &run.times) {
        report.skipped = Some(String::from("source does not vanish at u = 0"));
        return report;
    }
    let data_min = grid.min();
    if data_min < -1e-14 * upper.max(f64::MIN_POSITIVE) {
        report.skipped = Some(format!("terminal data has a negative node ({data_min:e})"));
        return report;
    }
    let horizon = rp.problem.horizon;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (t, u) in run.times.iter().zip(&run.trajectory) {
        let g = u.to_grid();
        let w = (rho * (t - horizon)).exp();
        let (a, b) = (w * g.min(), w * g.max());
        if a < -tol || b > upper + tol {
            report.violations += 1;
        }
        lo = lo.min(a);
        hi = hi.max(b);
    }
    report.min = lo;
    report.max = hi;
    report
}
