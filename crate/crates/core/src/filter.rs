//! Noise-to-filter coupling and the diagonal operators `Q` and `P = M̄Δ + Q`.
//!
//! `Q` acts on mode `p` by `q_p = (1/T) log(1 + γ⁻¹ e^{M̄Tμ_p})`, and `P` by
//! `s_p = q_p - M̄μ_p`. Both are evaluated in a form that never forms
//! `e^{M̄Tμ_p}` explicitly.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::basis::{Basis, SpectralField};
use crate::math::softplus;
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Relative slack accepted on `C1·T ≤ 1` so that `C1 = 1/T` passes after rounding.
const C1T_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    pub eps: f64,
    pub k: f64,
    pub c1: f64,
    pub horizon: f64,
    pub m_bar: f64,
    /// `log γ`; kept separately because `γ` itself overflows for tiny noise.
    pub log_gamma: f64,
    pub gamma: f64,
    pub beta: f64,
    /// `ε = K`, so `γ = 1` and nothing is filtered.
    pub degenerate: bool,
}

impl FilterParams {
    /// `γ = (K/ε)^{1/(C1 T)}`, `β = 1/γ`.
    pub fn from_epsilon(eps: f64, k: f64, c1: f64, horizon: f64, m_bar: f64) -> Result<Self> {
        check_positive("eps", eps)?;
        check_positive("K", k)?;
        check_common(c1, horizon, m_bar)?;
        if eps > k {
            return Err(Error::param(
                "eps",
                format!("ε = {eps} exceeds K = {k}, so γ < 1"),
            ));
        }
        let log_gamma = (k.ln() - eps.ln()) / (c1 * horizon);
        Ok(Self::assemble(eps, k, c1, horizon, m_bar, log_gamma))
    }

    /// Direct choice of `log γ ≥ 0`; `K = 1` and `ε = γ^{-C1 T}` are implied.
    pub fn from_log_gamma(log_gamma: f64, c1: f64, horizon: f64, m_bar: f64) -> Result<Self> {
        check_common(c1, horizon, m_bar)?;
        if !(log_gamma >= 0.0) || !log_gamma.is_finite() {
            return Err(Error::param("gamma", "need a finite γ ≥ 1"));
        }
        let eps = (-c1 * horizon * log_gamma).exp();
        Ok(Self::assemble(eps, 1.0, c1, horizon, m_bar, log_gamma))
    }

    fn assemble(eps: f64, k: f64, c1: f64, horizon: f64, m_bar: f64, log_gamma: f64) -> Self {
        let gamma = log_gamma.exp();
        FilterParams {
            eps,
            k,
            c1,
            horizon,
            m_bar,
            log_gamma,
            gamma,
            beta: (-log_gamma).exp(),
            degenerate: log_gamma == 0.0,
        }
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

fn check_common(c1: f64, horizon: f64, m_bar: f64) -> Result<()> {
    check_positive("C1", c1)?;
    check_positive("T", horizon)?;
    check_positive("M_bar", m_bar)?;
    if c1 * horizon > 1.0 + C1T_SLACK {
        return Err(Error::param(
            "C1",
            format!("C1·T = {} exceeds 1", c1 * horizon),
        ));
    }
    Ok(())
}

/// Modal multipliers of `Q` and `P` on one basis.
#[derive(Debug, Clone)]
pub struct ModalFilter {
    basis: Arc<Basis>,
    params: FilterParams,
    q: Vec<f64>,
    s: Vec<f64>,
}

impl ModalFilter {
    pub fn build(basis: &Arc<Basis>, params: FilterParams) -> Self {
        let t = params.horizon;
        let lg = params.log_gamma;
        let (q, s) = basis
            .eigenvalues()
            .map(|mu| {
                let x = params.m_bar * t * mu - lg;
                let q = softplus(x) / t;
                let s = if x > 0.0 {
                    ((-x).exp().ln_1p() - lg) / t
                } else {
                    q - params.m_bar * mu
                };
                (q, s)
            })
            .unzip();
        ModalFilter {
            basis: basis.clone(),
            params,
            q,
            s,
        }
    }

    pub fn params(&self) -> &FilterParams {
        &self.params
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    fn check(&self, u: &SpectralField) -> Result<()> {
        if Arc::ptr_eq(&self.basis, u.basis()) || *self.basis == **u.basis() {
            Ok(())
        } else {
            Err(Error::BasisMismatch)
        }
    }

    pub fn apply_q(&self, u: &SpectralField) -> Result<SpectralField> {
        self.check(u)?;
        Ok(u.map_modes(|p, c| self.q[p] * c))
    }

    pub fn apply_p(&self, u: &SpectralField) -> Result<SpectralField> {
        self.check(u)?;
        Ok(u.map_modes(|p, c| self.s[p] * c))
    }

    /// `(1/T) γ⁻¹ ‖u‖_𝕎` with `‖u‖_𝕎` the Gevrey norm of order `M̄T`.
    pub fn q_bound(&self, u: &SpectralField) -> Result<f64> {
        self.check(u)?;
        let p = &self.params;
        let w = u.gevrey_norm(p.m_bar * p.horizon)?;
        Ok(w * (-p.log_gamma).exp() / p.horizon)
    }

    /// `(1/T) log γ ‖u‖`
    pub fn p_bound(&self, u: &SpectralField) -> f64 {
        self.params.log_gamma / self.params.horizon * u.l2_norm()
    }
}
