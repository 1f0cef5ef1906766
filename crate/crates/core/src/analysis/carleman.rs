//! Weighted space-time energy inequality with weight `|λ(t)|^{-m/k}`,
//! `λ(t) = t - T - η`:
//!
//! ```text
//! K ‖λ^{-m/k}(aΔv - v_t)‖² ≥ ‖λ^{-m/k-1} v‖² + ½ ‖λ^{-m/k} ∇v‖²
//! ```
//!
//! for `v` vanishing at `t = 0`, `t = T` and on `∂Ω`. Space integrals use
//! Parseval in the eigenbasis, time integrals composite Simpson. The weights
//! are accumulated relative to their largest exponent so that large `m/k`
//! only overflows when the final values themselves do.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::basis::{Basis, SpectralField};
use crate::math::EXP_LIMIT;
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Boundary/endpoint vanishing tolerance.
const VANISH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlemanConfig {
    pub eta: f64,
    pub m: f64,
    pub k: f64,
    pub horizon: f64,
    /// Simpson intervals in time (rounded up to even).
    pub time_intervals: usize,
}

impl CarlemanConfig {
    pub fn new(eta: f64, m: f64, k: f64, horizon: f64) -> Self {
        CarlemanConfig {
            eta,
            m,
            k,
            horizon,
            time_intervals: 400,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eta", self.eta),
            ("m", self.m),
            ("k", self.k),
            ("T", self.horizon),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// A function of space and time given by its modal coefficients.
pub trait SpaceTimeField {
    fn basis(&self) -> &Arc<Basis>;
    /// `(v̂(t), ∂_t v̂(t))`
    fn sample(&self, t: f64) -> (Vec<f64>, Vec<f64>);
}

/// `v(x, t) = w(x) τ(t)`; `temporal` returns `(τ(t), τ'(t))`.
#[derive(Clone)]
pub struct SeparableField {
    pub spatial: SpectralField,
    pub temporal: Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>,
}

impl SpaceTimeField for SeparableField {
    fn basis(&self) -> &Arc<Basis> {
        self.spatial.basis()
    }

    fn sample(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let (tau, dtau) = (self.temporal)(t);
        let c = self.spatial.coeffs();
        (
            c.iter().map(|v| v * tau).collect(),
            c.iter().map(|v| v * dtau).collect(),
        )
    }
}

/// Stored snapshots, interpolated linearly in time.
#[derive(Debug, Clone)]
pub struct SampledField {
    times: Vec<f64>,
    fields: Vec<SpectralField>,
}

impl SampledField {
    pub fn new(times: Vec<f64>, fields: Vec<SpectralField>) -> Result<Self> {
        if times.len() != fields.len() || times.len() < 2 {
            return Err(Error::param(
                "samples",
                "need at least two matching snapshots",
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("times", "must be strictly increasing"));
        }
        for f in &fields[1..] {
            fields[0].check_same_basis(f)?;
        }
        Ok(SampledField { times, fields })
    }
}

impl SpaceTimeField for SampledField {
    fn basis(&self) -> &Arc<Basis> {
        self.fields[0].basis()
    }

    fn sample(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let i = self
            .times
            .partition_point(|s| *s <= t)
            .clamp(1, self.times.len() - 1);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let h = t1 - t0;
        let w = ((t - t0) / h).clamp(0.0, 1.0);
        let (a, b) = (self.fields[i - 1].coeffs(), self.fields[i].coeffs());
        (
            a.iter()
                .zip(b)
                .map(|(x, y)| (1.0 - w) * x + w * y)
                .collect(),
            a.iter().zip(b).map(|(x, y)| (y - x) / h).collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlemanReport {
    pub m: f64,
    /// `‖λ^{-m/k}(aΔv - v_t)‖²`
    pub lhs: f64,
    /// `‖λ^{-m/k-1} v‖²`
    pub weighted_v: f64,
    /// `‖λ^{-m/k} ∇v‖²`
    pub weighted_grad: f64,
    /// `weighted_v + weighted_grad / 2`
    pub rhs_lower: f64,
    /// `K · lhs / rhs_lower` (∞ when the right side vanishes)
    pub margin: f64,
    pub holds: bool,
    /// Smallest `D ≥ 0` with `lhs ≥ (m/k) weighted_v - D weighted_grad`.
    pub d_min: f64,
}

fn simpson_weights(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| {
            if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            }
        })
        .collect()
}

fn check_vanishing(v: &dyn SpaceTimeField, cfg: &CarlemanConfig) -> Result<()> {
    let basis = v.basis();
    for t in [0.0, cfg.horizon] {
        let (c, _) = v.sample(t);
        let n = crate::math::norm2(c.iter().copied());
        if n > VANISH_TOL {
            return Err(Error::Precondition(format!(
                "v(·, {t}) has norm {n:e}, expected 0"
            )));
        }
    }
    let probes = 8;
    for i in 0..=probes {
        let t = cfg.horizon * i as f64 / probes as f64;
        let (c, _) = v.sample(t);
        let trace = basis.boundary_l2_squared(&c).sqrt();
        if trace > VANISH_TOL {
            return Err(Error::Precondition(format!(
                "boundary trace {trace:e} at t = {t}"
            )));
        }
    }
    Ok(())
}

/// Evaluate both sides of the inequality for one `m` and a given `K`.
pub fn carleman_check(
    v: &dyn SpaceTimeField,
    a: f64,
    cfg: &CarlemanConfig,
    k_const: f64,
) -> Result<CarlemanReport> {
    cfg.validate()?;
    check_vanishing(v, cfg)?;
    let basis = v.basis();
    let n = cfg.time_intervals.max(2).next_multiple_of(2);
    let h = cfg.horizon / n as f64;
    let sw = simpson_weights(n);
    let p = cfg.m / cfg.k;

    // log-weights: -2p log|λ| for the operator and gradient terms, -2(p+1) log|λ| for v
    let log_abs: Vec<f64> = (0..=n)
        .map(|i| (cfg.horizon + cfg.eta - i as f64 * h).ln())
        .collect();
    let shift = log_abs
        .iter()
        .map(|l| -2.0 * (p + 1.0) * l)
        .chain(log_abs.iter().map(|l| -2.0 * p * l))
        .fold(f64::NEG_INFINITY, f64::max);

    let (mut s_op, mut s_v, mut s_g) = (0.0, 0.0, 0.0);
    for i in 0..=n {
        let t = i as f64 * h;
        let (c, dc) = v.sample(t);
        let (mut op, mut vv, mut gg) = (0.0, 0.0, 0.0);
        for (j, mu) in basis.eigenvalues().enumerate() {
            let r = -a * mu * c[j] - dc[j];
            op += r * r;
            vv += c[j] * c[j];
            gg += mu * c[j] * c[j];
        }
        let w_main = (-2.0 * p * log_abs[i] - shift).exp();
        let w_v = (-2.0 * (p + 1.0) * log_abs[i] - shift).exp();
        s_op += sw[i] * w_main * op;
        s_v += sw[i] * w_v * vv;
        s_g += sw[i] * w_main * gg;
    }
    let scale = h / 3.0;
    let (s_op, s_v, s_g) = (s_op * scale, s_v * scale, s_g * scale);
    let rhs_scaled = s_v + 0.5 * s_g;
    let margin = if rhs_scaled > 0.0 {
        k_const * s_op / rhs_scaled
    } else {
        f64::INFINITY
    };
    let holds = k_const * s_op >= rhs_scaled;
    let d_min = if s_g > 0.0 {
        ((p * s_v - s_op) / s_g).max(0.0)
    } else {
        0.0
    };

    let raw = |s: f64| -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        let e = shift + s.ln();
        if e > EXP_LIMIT {
            return Err(Error::WeightOverflow(format!(
                "weighted norm e^{e:.1} out of range; lower m/k = {p} or raise η = {}",
                cfg.eta
            )));
        }
        Ok(e.exp())
    };
    let (lhs, weighted_v, weighted_grad) = (raw(s_op)?, raw(s_v)?, raw(s_g)?);
    Ok(CarlemanReport {
        m: cfg.m,
        lhs,
        weighted_v,
        weighted_grad,
        rhs_lower: weighted_v + 0.5 * weighted_grad,
        margin,
        holds,
        d_min,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CarlemanSweep {
    pub reports: Vec<CarlemanReport>,
    /// Smallest tested `m` from which the inequality holds for every larger tested `m`.
    pub m_star: Option<f64>,
    /// Largest `D_min` seen across the sweep.
    pub d_min: f64,
    /// Smallest margin over `m ≥ m*`.
    pub margin: f64,
}

/// Run [`carleman_check`] over increasing `ms` with the other settings of `cfg`.
pub fn carleman_sweep(
    v: &dyn SpaceTimeField,
    a: f64,
    cfg: &CarlemanConfig,
    ms: &[f64],
    k_const: f64,
) -> Result<CarlemanSweep> {
    if ms.is_empty() || ms.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param(
            "m",
            "sweep values must be nonempty and increasing",
        ));
    }
    let reports = ms
        .iter()
        .map(|&m| carleman_check(v, a, &CarlemanConfig { m, ..*cfg }, k_const))
        .collect::<Result<Vec<_>>>()?;
    let first_good = reports.iter().rposition(|r| !r.holds).map_or(0, |i| i + 1);
    let m_star = reports.get(first_good).map(|r| r.m);
    let margin = reports[first_good..]
        .iter()
        .map(|r| r.margin)
        .fold(f64::INFINITY, f64::min);
    let d_min = reports.iter().map(|r| r.d_min).fold(0.0, f64::max);
    Ok(CarlemanSweep {
        reports,
        m_star,
        d_min,
        margin,
    })
}
