use alloc::format;
use alloc::vec::Vec;

use super::{BackwardRun, RegularizedProblem};
use crate::basis::SpectralField;
use crate::math::{phi1, steps_for};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

impl RegularizedProblem {
    /// March from `T` down to `0` with steps
    /// `û(t - Δt) = e^{-λΔt} û(t) - Δt φ₁(-λΔt) F̂(t)`,
    /// exact per mode when `F = 0`. States are kept at every `stride`-th grid
    /// time counted from `0`, plus both ends.
    pub fn solve_backward(
        &self,
        u_f: &SpectralField,
        dt: f64,
        stride: usize,
    ) -> Result<BackwardRun> {
        self.check_data(u_f)?;
        let horizon = self.problem.horizon;
        let steps = steps_for(horizon, dt).ok_or_else(|| {
            Error::param("dt", format!("Δt = {dt} does not divide T = {horizon}"))
        })?;
        let stride = stride.max(1);
        let (decay, gain) = self.step_factors(dt);

        let mut u = u_f.coeffs().to_vec();
        let mut times = Vec::new();
        let mut trajectory = Vec::new();
        times.push(horizon);
        trajectory.push(u_f.clone());
        for n in (1..=steps).rev() {
            let t = n as f64 * dt;
            self.backward_step(&mut u, t, &decay, &gain)?;
            let m = n - 1;
            if m % stride == 0 {
                times.push(m as f64 * dt);
                trajectory.push(SpectralField::from_coeffs(&self.problem.basis, u.clone())?);
            }
        }
        times.reverse();
        trajectory.reverse();
        let mut run = BackwardRun {
            times,
            trajectory,
            dt,
            iterations: None,
            residuals: Vec::new(),
            audit: Default::default(),
        };
        run.audit = self.audit(&run);
        Ok(run)
    }

    /// `(e^{-λΔt}, Δt φ₁(-λΔt))` per mode.
    pub(crate) fn step_factors(&self, dt: f64) -> (Vec<f64>, Vec<f64>) {
        self.lambda
            .iter()
            .map(|l| ((-l * dt).exp(), dt * phi1(-l * dt)))
            .unzip()
    }

    fn backward_step(&self, u: &mut [f64], t: f64, decay: &[f64], gain: &[f64]) -> Result<()> {
        if self.problem.source.is_zero() {
            for (c, d) in u.iter_mut().zip(decay) {
                *c *= d;
            }
        } else {
            let cur = SpectralField::from_coeffs(&self.problem.basis, u.to_vec())
                .map_err(|_| non_finite(u, t))?;
            let f = self
                .problem
                .source
                .project(&cur, t)
                .ok_or_else(|| non_finite(u, t))?;
            for (p, c) in u.iter_mut().enumerate() {
                *c = decay[p] * *c - gain[p] * f.coeffs()[p];
            }
        }
        if u.iter().any(|c| !c.is_finite()) {
            return Err(non_finite(u, t));
        }
        Ok(())
    }

    /// State at an arbitrary `t`, obtained from the nearest stored state above
    /// `t` by one partial step of the direct scheme.
    pub fn state_at_time(&self, run: &BackwardRun, t: f64) -> Result<SpectralField> {
        if let Some(u) = run.state_at(t) {
            return Ok(u.clone());
        }
        let i = run
            .times
            .iter()
            .position(|&s| s > t)
            .ok_or_else(|| Error::param("t", format!("t = {t} lies outside the run")))?;
        if t < 0.0 {
            return Err(Error::param("t", format!("t = {t} is negative")));
        }
        let s = run.times[i];
        let h = s - t;
        let (decay, gain) = self.step_factors(h);
        let mut u = run.trajectory[i].coeffs().to_vec();
        self.backward_step(&mut u, s, &decay, &gain)?;
        SpectralField::from_coeffs(&self.problem.basis, u)
    }
}

pub(super) fn non_finite(u: &[f64], t: f64) -> Error {
    let mode = u.iter().position(|c| !c.is_finite()).unwrap_or(0);
    Error::NonFiniteState { mode, t }
}
