//! Backward integration of the regularized problem
//! `u_t = a Δu + Q u + F(x, t; u)`, `u(T) = u_f^ε`.
//!
//! In the eigenbasis the linear part is diagonal with rate
//! `λ_p = -a μ_p + q_p`. Two integrators are provided: a direct modal
//! exponential stepper ([`RegularizedProblem::solve_backward`]) and a Picard
//! iteration on the integral form in the scaled variable
//! `v = e^{ρ(t - T)} u` ([`RegularizedProblem::volterra_iterate`]).

mod direct;
mod positivity;
mod volterra;

pub use positivity::{positivity_check, PositivityReport};
pub use volterra::VolterraOptions;

use alloc::format;
use alloc::vec::Vec;

use crate::basis::SpectralField;
use crate::filter::{FilterParams, ModalFilter};
use crate::forward::ProblemSpec;
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Which a-priori estimate `ρ` is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoMode {
    /// `2ρ = L_F + C1² log²γ + 2`
    Existence,
    /// `ρ = C1 log γ + 1/2 + 2 L_F²`
    Convergence,
    /// `ρ = L_F + C1 log γ + 1`
    Positivity,
    /// `ρ = C1 log γ + (M̲ + 1)/4 + L_F²/M̲`
    LocallyLipschitz,
}

pub fn rho_select(mode: RhoMode, l_f: f64, c1: f64, log_gamma: f64, m_lower: f64) -> f64 {
    match mode {
        RhoMode::Existence => (l_f + c1 * c1 * log_gamma * log_gamma + 2.0) / 2.0,
        RhoMode::Convergence => c1 * log_gamma + 0.5 + 2.0 * l_f * l_f,
        RhoMode::Positivity => l_f + c1 * log_gamma + 1.0,
        RhoMode::LocallyLipschitz => c1 * log_gamma + (m_lower + 1.0) / 4.0 + l_f * l_f / m_lower,
    }
}

/// Problem, filter and modal rates, checked for the growth cap.
#[derive(Debug, Clone)]
pub struct RegularizedProblem {
    pub problem: ProblemSpec,
    pub filter: ModalFilter,
    lambda: Vec<f64>,
}

impl RegularizedProblem {
    pub fn assemble(problem: ProblemSpec, params: FilterParams) -> Result<Self> {
        if !(problem.a < problem.m_bar) {
            return Err(Error::param(
                "a",
                format!(
                    "diffusion a = {} must be below M̄ = {}",
                    problem.a, problem.m_bar
                ),
            ));
        }
        if params.m_bar != problem.m_bar || params.horizon != problem.horizon {
            return Err(Error::param(
                "filter",
                "filter built with a different M̄ or T",
            ));
        }
        let filter = ModalFilter::build(&problem.basis, params);
        let lambda: Vec<f64> = problem
            .basis
            .eigenvalues()
            .zip(filter.q())
            .map(|(mu, q)| -problem.a * mu + q)
            .collect();
        let cap = params.log_gamma / params.horizon;
        for (p, l) in lambda.iter().enumerate() {
            if -l > cap + growth_tol(cap, problem.a * problem.basis.eigenvalue(p)) {
                return Err(Error::param(
                    "filter",
                    format!("mode {p}: a·μ - q = {} exceeds log γ / T = {cap}", -l),
                ));
            }
        }
        Ok(RegularizedProblem {
            problem,
            filter,
            lambda,
        })
    }

    pub fn params(&self) -> &FilterParams {
        self.filter.params()
    }

    /// `A = M̄ - a`
    pub fn a_gap(&self) -> f64 {
        self.problem.m_bar - self.problem.a
    }

    /// `λ_p = -a μ_p + q_p`
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Largest per-mode backward growth rate `max_p (a μ_p - q_p)`.
    pub fn max_growth_rate(&self) -> f64 {
        self.lambda
            .iter()
            .map(|l| -l)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `ρ` for the chosen estimate, with `L_F` of the (cut-off) source.
    pub fn rho(&self, mode: RhoMode) -> f64 {
        let p = self.params();
        rho_select(
            mode,
            self.problem.source.effective_lipschitz(),
            p.c1,
            p.log_gamma,
            self.problem.m_lower,
        )
    }

    /// Closed form `e^{λ_p (t - T)} û_p(T)` of the linear problem.
    pub fn linear_closed_form(&self, u_f: &SpectralField, t: f64) -> SpectralField {
        let horizon = self.problem.horizon;
        u_f.map_modes(|p, c| (self.lambda[p] * (t - horizon)).exp() * c)
    }

    fn check_data(&self, u_f: &SpectralField) -> Result<()> {
        if *self.problem.basis != **u_f.basis() {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }
}

fn growth_tol(cap: f64, a_mu: f64) -> f64 {
    1e-12 * (1.0 + cap.abs() + a_mu.abs())
}

/// Per-mode check that backward amplification over `[t, T]` stays below
/// `γ^{(T - t)/T}`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AmplificationAudit {
    pub checked: usize,
    pub violations: usize,
    /// Largest `log(amplification) - (T - t) log γ / T` seen (should be `≤ 0`).
    pub worst_excess: f64,
    pub worst_mode: usize,
    pub worst_time: f64,
    /// Whether actual coefficient ratios were also checked (linear runs).
    pub ratios_checked: bool,
}

impl AmplificationAudit {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn record(&mut self, excess: f64, tol: f64, mode: usize, t: f64) {
        self.checked += 1;
        if excess > tol {
            self.violations += 1;
        }
        if self.checked == 1 || excess > self.worst_excess {
            self.worst_excess = excess;
            self.worst_mode = mode;
            self.worst_time = t;
        }
    }
}

/// Backward trajectory, stored in increasing time order.
#[derive(Debug, Clone)]
pub struct BackwardRun {
    pub times: Vec<f64>,
    pub trajectory: Vec<SpectralField>,
    pub dt: f64,
    /// Picard iterations used (Volterra path only).
    pub iterations: Option<usize>,
    /// Sup-in-time differences between successive iterates (Volterra path only).
    pub residuals: Vec<f64>,
    pub audit: AmplificationAudit,
}

impl BackwardRun {
    /// Stored state at `t`, if `t` is on the storage grid.
    pub fn state_at(&self, t: f64) -> Option<&SpectralField> {
        let horizon = *self.times.last()?;
        let tol = 1e-9 * horizon.max(1.0);
        self.times
            .iter()
            .position(|s| (s - t).abs() <= tol)
            .map(|i| &self.trajectory[i])
    }

    pub fn initial(&self) -> &SpectralField {
        &self.trajectory[0]
    }

    pub fn terminal(&self) -> &SpectralField {
        self.trajectory.last().expect("non-empty trajectory")
    }
}

impl RegularizedProblem {
    /// Mode-wise amplification audit. The rate bound is checked for every
    /// mode and stored time; for `F = 0` the measured ratios
    /// `|û_p(t)| / |û_p(T)|` are checked as well.
    pub fn audit(&self, run: &BackwardRun) -> AmplificationAudit {
        let horizon = self.problem.horizon;
        let lg = self.params().log_gamma;
        let mut audit = AmplificationAudit {
            ratios_checked: self.problem.source.is_zero(),
            ..Default::default()
        };
        let terminal = run.terminal();
        for (t, u) in run.times.iter().zip(&run.trajectory) {
            let span = horizon - t;
            let allowed = span * lg / horizon;
            for p in 0..self.lambda.len() {
                let rate = -self.lambda[p] * span;
                let tol = growth_tol(
                    allowed,
                    self.problem.a * self.problem.basis.eigenvalue(p) * span,
                );
                audit.record(rate - allowed, tol, p, *t);
                if audit.ratios_checked {
                    let (num, den) = (u.coeffs()[p].abs(), terminal.coeffs()[p].abs());
                    if den > 0.0 && num > 0.0 {
                        let excess = (num.ln() - den.ln()) - allowed;
                        audit.record(excess, tol + 1e-12, p, *t);
                    }
                }
            }
        }
        audit
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{Basis, BasisSpec, DomainKind};
    use crate::nonlinearity::SourceSpec;
    use core::f64::consts::E;

    #[test]
    fn rho_examples() {
        assert_eq!(rho_select(RhoMode::Existence, 0.0, 1.0, 0.0, 1.0), 1.0);
        assert!((rho_select(RhoMode::Convergence, 1.0, 1.0, 2.0, 1.0) - 4.5).abs() < 1e-15);
        assert!((rho_select(RhoMode::Positivity, 1.0, 1.0, 1.0, 1.0) - 3.0).abs() < 1e-15);
        assert!((rho_select(RhoMode::LocallyLipschitz, 2.0, 1.0, 1.0, 1.0) - 5.5).abs() < 1e-15);
    }

    fn problem(a: f64, m_bar: f64, p: usize) -> ProblemSpec {
        let b = Basis::build(BasisSpec::interval(DomainKind::IntervalDirichlet, p)).unwrap();
        ProblemSpec::new(b, a, m_bar, 1.0, SourceSpec::zero()).unwrap()
    }

    #[test]
    fn assemble_gap_and_rejection() {
        let params = FilterParams::from_log_gamma(2.0, 1.0, 1.0, 1.0).unwrap();
        let rp = RegularizedProblem::assemble(problem(0.5, 1.0, 8), params).unwrap();
        assert_eq!(rp.a_gap(), 0.5);
        assert!(RegularizedProblem::assemble(problem(1.0, 1.0, 8), params).is_err());
    }

    #[test]
    fn unregularized_rates_turn_positive() {
        let params = FilterParams::from_log_gamma(0.0, 1.0, 1.0, 1.0).unwrap();
        let rp = RegularizedProblem::assemble(problem(0.5, 1.0, 32), params).unwrap();
        for (p, l) in rp.lambda().iter().enumerate() {
            let mu = rp.problem.basis.eigenvalue(p);
            assert!(*l >= 0.5 * mu);
        }
    }

    #[test]
    fn growth_cap_sweep() {
        let params = FilterParams::from_log_gamma(5.0, 1.0, 1.0, 1.0).unwrap();
        let rp = RegularizedProblem::assemble(problem(0.9, 1.0, 64), params).unwrap();
        assert!(rp.max_growth_rate() <= 5.0);
    }

    #[test]
    fn closed_form_single_mode() {
        let params = FilterParams::from_log_gamma(2.0, 1.0, 1.0, 2.0).unwrap();
        let rp = RegularizedProblem::assemble(problem(1.0, 2.0, 4), params).unwrap();
        let lambda = -1.0 + (1.0 + (-2.0f64).exp() * E * E).ln();
        assert!((rp.lambda()[0] - lambda).abs() < 1e-15);
    }
}
