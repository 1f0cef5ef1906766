use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::direct::non_finite;
use super::{BackwardRun, RegularizedProblem};
use crate::basis::SpectralField;
use crate::math::{norm2, phi1, phi2, steps_for, EXP_LIMIT};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolterraOptions {
    /// Stop once successive scaled iterates differ by less than this in the
    /// sup-in-time `L²` norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Scaling exponent of `v = e^{ρ(t - T)} u`.
    pub rho: f64,
}

impl RegularizedProblem {
    /// Picard iteration on the integral form
    ///
    /// ```text
    /// û(t) = e^{λ(t-T)} û_f - ∫_t^T e^{λ(t-s)} F̂(s; u(s)) ds
    /// ```
    ///
    /// carried out on the scaled coefficients `V = e^{ρ(t-T)} û`. The
    /// integrating factor is kept exact and `F̂` is interpolated linearly
    /// between grid times, so each sweep is a product of per-mode
    /// exponentials and `φ₁`, `φ₂` weights; no stiff term is iterated.
    pub fn volterra_iterate(
        &self,
        u_f: &SpectralField,
        dt: f64,
        stride: usize,
        opts: VolterraOptions,
    ) -> Result<BackwardRun> {
        self.check_data(u_f)?;
        let horizon = self.problem.horizon;
        if !(opts.tol > 0.0) {
            return Err(Error::param("tol", "must be positive"));
        }
        if !(opts.rho >= 0.0) || opts.rho * horizon > EXP_LIMIT {
            return Err(Error::param(
                "rho",
                format!("ρ = {} must lie in [0, {}/T]", opts.rho, EXP_LIMIT),
            ));
        }
        let steps = steps_for(horizon, dt).ok_or_else(|| {
            Error::param("dt", format!("Δt = {dt} does not divide T = {horizon}"))
        })?;
        let stride = stride.max(1);
        let modes = self.lambda.len();

        let decay: Vec<f64> = self.lambda.iter().map(|l| (-l * dt).exp()).collect();
        // weights of F_n (left end) and F_{n+1} (right end) in the interval integral
        let (w_left, w_right): (Vec<f64>, Vec<f64>) = self
            .lambda
            .iter()
            .map(|l| {
                let z = -l * dt;
                let (p1, p2) = (phi1(z), phi2(z));
                (dt * p2, dt * (p1 - p2))
            })
            .unzip();
        let scale: Vec<f64> = (0..=steps)
            .map(|n| (opts.rho * (n as f64 * dt - horizon)).exp())
            .collect();

        let linear = self.problem.source.is_zero();
        let mut v = vec![vec![0.0; modes]; steps + 1];
        let mut next = vec![vec![0.0; modes]; steps + 1];
        let mut forcing = vec![vec![0.0; modes]; steps + 1];
        let mut residuals = Vec::new();

        for iter in 1..=opts.max_iter {
            if !linear {
                for n in 0..=steps {
                    let t = n as f64 * dt;
                    let u: Vec<f64> = v[n].iter().map(|c| c / scale[n]).collect();
                    let field = SpectralField::from_coeffs(&self.problem.basis, u)
                        .map_err(|_| non_finite(&v[n], t))?;
                    let f = self
                        .problem
                        .source
                        .project(&field, t)
                        .ok_or_else(|| non_finite(&v[n], t))?;
                    forcing[n].copy_from_slice(f.coeffs());
                }
            }
            // unscaled sweep from T down to 0, then rescale
            let mut u = u_f.coeffs().to_vec();
            next[steps].copy_from_slice(&u);
            for n in (0..steps).rev() {
                for p in 0..modes {
                    u[p] = decay[p] * u[p]
                        - (w_left[p] * forcing[n][p] + w_right[p] * forcing[n + 1][p]);
                }
                if u.iter().any(|c| !c.is_finite()) {
                    return Err(non_finite(&u, n as f64 * dt));
                }
                for p in 0..modes {
                    next[n][p] = u[p] * scale[n];
                }
            }
            let residual = (0..=steps)
                .map(|n| norm2(next[n].iter().zip(&v[n]).map(|(a, b)| a - b)))
                .fold(0.0, f64::max);
            residuals.push(residual);
            core::mem::swap(&mut v, &mut next);
            if residual < opts.tol {
                let mut times = Vec::new();
                let mut trajectory = Vec::new();
                for n in 0..=steps {
                    if n % stride == 0 || n == steps {
                        let t = if n == steps { horizon } else { n as f64 * dt };
                        let coeffs = v[n].iter().map(|c| c / scale[n]).collect();
                        times.push(t);
                        trajectory.push(SpectralField::from_coeffs(&self.problem.basis, coeffs)?);
                    }
                }
                let mut run = BackwardRun {
                    times,
                    trajectory,
                    dt,
                    iterations: Some(iter),
                    residuals,
                    audit: Default::default(),
                };
                run.audit = self.audit(&run);
                return Ok(run);
            }
        }
        Err(Error::NonConvergence {
            iterations: opts.max_iter,
            residuals,
        })
    }
}
