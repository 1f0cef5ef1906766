//! Forward integration `u_t = a Δu + F(x, t; u)` to manufacture terminal data,
//! and noise injection at a prescribed `L²` level.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::basis::{Basis, SpectralField};
use crate::math::{phi1, steps_for};
use crate::nonlinearity::SourceSpec;
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// The physical problem: basis (domain and boundary condition), diffusion
/// `a`, its bounds `M̲ ≤ a < M̄`, horizon `T` and source.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub basis: Arc<Basis>,
    pub a: f64,
    pub m_bar: f64,
    pub m_lower: f64,
    pub horizon: f64,
    pub source: SourceSpec,
}

impl ProblemSpec {
    pub fn new(
        basis: Arc<Basis>,
        a: f64,
        m_bar: f64,
        horizon: f64,
        source: SourceSpec,
    ) -> Result<Self> {
        let p = ProblemSpec {
            basis,
            a,
            m_bar,
            m_lower: a,
            horizon,
            source,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_m_lower(mut self, m_lower: f64) -> Result<Self> {
        self.m_lower = m_lower;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a", self.a),
            ("M_bar", self.m_bar),
            ("M_lower", self.m_lower),
            ("T", self.horizon),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(
                    name,
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ForwardRun {
    pub times: Vec<f64>,
    pub trajectory: Vec<SpectralField>,
    pub dt: f64,
    pub steps: usize,
}

impl ForwardRun {
    pub fn terminal(&self) -> &SpectralField {
        self.trajectory
            .last()
            .expect("trajectory holds at least the initial state")
    }

    pub fn initial(&self) -> &SpectralField {
        &self.trajectory[0]
    }
}

/// Exponential Euler in the eigenbasis: exact for the linear part, first order
/// in the source. States are stored every `stride` steps (and always at `T`).
pub fn solve_forward(
    problem: &ProblemSpec,
    u0: &SpectralField,
    dt: f64,
    stride: usize,
) -> Result<ForwardRun> {
    if !Arc::ptr_eq(&problem.basis, u0.basis()) && *problem.basis != **u0.basis() {
        return Err(Error::BasisMismatch);
    }
    let steps = steps_for(problem.horizon, dt).ok_or_else(|| {
        Error::param(
            "dt",
            format!("Δt = {dt} does not divide T = {}", problem.horizon),
        )
    })?;
    let stride = stride.max(1);
    let decay: Vec<f64> = problem
        .basis
        .eigenvalues()
        .map(|mu| (-problem.a * mu * dt).exp())
        .collect();
    let gain: Vec<f64> = problem
        .basis
        .eigenvalues()
        .map(|mu| dt * phi1(-problem.a * mu * dt))
        .collect();

    let mut u = u0.coeffs().to_vec();
    let mut times = Vec::with_capacity(steps / stride + 2);
    let mut trajectory = Vec::with_capacity(steps / stride + 2);
    times.push(0.0);
    trajectory.push(u0.clone());
    for n in 0..steps {
        let t = n as f64 * dt;
        if problem.source.is_zero() {
            for (c, d) in u.iter_mut().zip(&decay) {
                *c *= d;
            }
        } else {
            let cur = SpectralField::from_coeffs(&problem.basis, u.clone())
                .map_err(|_| non_finite(&u, t))?;
            let f = problem
                .source
                .project(&cur, t)
                .ok_or_else(|| non_finite(&u, t))?;
            for (p, c) in u.iter_mut().enumerate() {
                *c = decay[p] * *c + gain[p] * f.coeffs()[p];
            }
        }
        let t_next = (n + 1) as f64 * dt;
        if u.iter().any(|c| !c.is_finite()) {
            return Err(non_finite(&u, t_next));
        }
        if (n + 1) % stride == 0 || n + 1 == steps {
            times.push(if n + 1 == steps {
                problem.horizon
            } else {
                t_next
            });
            trajectory.push(SpectralField::from_coeffs(&problem.basis, u.clone())?);
        }
    }
    Ok(ForwardRun {
        times,
        trajectory,
        dt,
        steps,
    })
}

fn non_finite(u: &[f64], t: f64) -> Error {
    let mode = u.iter().position(|c| !c.is_finite()).unwrap_or(0);
    Error::NonFiniteState { mode, t }
}

#[derive(Debug, Clone)]
pub struct NoisySample {
    pub field: SpectralField,
    pub eps: f64,
    pub seed: u64,
    /// `‖u_f - u_f^ε‖_{L²}`
    pub achieved_distance: f64,
}

/// Fraction of `ε` used for the perturbation, so that the distance stays strictly inside the budget.
pub const NOISE_FRACTION: f64 = 0.99;

/// Add spectral white noise, rescaled to `L²` norm `0.99 ε`.
pub fn add_noise(u_f: &SpectralField, eps: f64, seed: u64) -> Result<NoisySample> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::param(
            "eps",
            format!("noise level must be finite and ≥ 0, got {eps}"),
        ));
    }
    if eps == 0.0 {
        return Ok(NoisySample {
            field: u_f.clone(),
            eps,
            seed,
            achieved_distance: 0.0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = u_f.len();
    let mut xi = Vec::with_capacity(n + 1);
    while xi.len() < n {
        let (z0, z1) = box_muller(&mut rng);
        xi.push(z0);
        xi.push(z1);
    }
    xi.truncate(n);
    let norm = crate::math::norm2(xi.iter().copied());
    let scale = NOISE_FRACTION * eps / norm;
    let noise = SpectralField::from_coeffs(u_f.basis(), xi.iter().map(|z| z * scale).collect())?;
    let field = u_f.add(&noise)?;
    let achieved_distance = field.sub(u_f)?.l2_norm();
    Ok(NoisySample {
        field,
        eps,
        seed,
        achieved_distance,
    })
}

fn unit_open(rng: &mut ChaCha8Rng) -> f64 {
    // uniform on (0, 1]
    ((rng.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64
}

fn box_muller(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1 = unit_open(rng);
    let u2 = unit_open(rng);
    let r = (-2.0 * u1.ln()).sqrt();
    let th = 2.0 * core::f64::consts::PI * u2;
    (r * th.cos(), r * th.sin())
}
