use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::{gevrey, Basis, MAX_DIM};
use crate::math::norm2;
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Coefficients of a function in the eigenbasis, ordered like [`Basis::modes`].
#[derive(Debug, Clone)]
pub struct SpectralField {
    basis: Arc<Basis>,
    coeffs: Vec<f64>,
}

/// Nodal values on the tensor quadrature grid of a basis (axis 0 slowest).
#[derive(Debug, Clone)]
pub struct GridField {
    basis: Arc<Basis>,
    values: Vec<f64>,
}

fn same(a: &Arc<Basis>, b: &Arc<Basis>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        same(&self.basis, &other.basis) && self.coeffs == other.coeffs
    }
}

impl SpectralField {
    pub fn zeros(basis: &Arc<Basis>) -> Self {
        SpectralField {
            basis: basis.clone(),
            coeffs: vec![0.0; basis.len()],
        }
    }

    pub fn from_coeffs(basis: &Arc<Basis>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("spectral coefficients"));
        }
        Ok(SpectralField {
            basis: basis.clone(),
            coeffs,
        })
    }

    /// The basis function `φ_mode` itself.
    pub fn unit(basis: &Arc<Basis>, mode: usize) -> Self {
        let mut f = Self::zeros(basis);
        f.coeffs[mode] = 1.0;
        f
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn check_same_basis(&self, other: &SpectralField) -> Result<()> {
        if same(&self.basis, &other.basis) {
            Ok(())
        } else {
            Err(Error::BasisMismatch)
        }
    }

    pub fn to_grid(&self) -> GridField {
        GridField {
            basis: self.basis.clone(),
            values: self.basis.synthesize_values(&self.coeffs),
        }
    }

    /// Nodal samples of `∂u/∂x_k` for every axis `k`.
    pub fn gradient_grid(&self) -> Vec<GridField> {
        (0..self.basis.dim())
            .map(|k| GridField {
                basis: self.basis.clone(),
                values: self.basis.synthesize_derivative(&self.coeffs, k),
            })
            .collect()
    }

    /// Point evaluation by direct summation.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(p, c)| c * self.basis.eval_mode(p, x))
            .sum()
    }

    /// The same coefficients viewed on a basis with the same modes but a
    /// different quadrature grid.
    pub fn on_basis(&self, basis: &Arc<Basis>) -> Result<SpectralField> {
        if !self.basis.same_modes(basis) {
            return Err(Error::BasisMismatch);
        }
        Ok(SpectralField {
            basis: basis.clone(),
            coeffs: self.coeffs.clone(),
        })
    }

    pub fn l2_norm(&self) -> f64 {
        norm2(self.coeffs.iter().copied())
    }

    /// `‖∇u‖_{L²} = sqrt(Σ μ_p û_p²)`
    pub fn h1_seminorm(&self) -> f64 {
        norm2(
            self.coeffs
                .iter()
                .zip(self.basis.eigenvalues())
                .map(|(c, mu)| c * mu.sqrt()),
        )
    }

    /// `sqrt(Σ e^{2αμ_p} û_p²)`
    pub fn gevrey_norm(&self, alpha: f64) -> Result<f64> {
        gevrey::gevrey_norm(&self.coeffs, &self.basis, alpha)
    }

    /// `max(‖u‖_∞, ‖∇u‖_∞)` sampled on the quadrature grid.
    pub fn w1_inf_norm(&self) -> f64 {
        let mut m = self.to_grid().max_abs();
        for g in self.gradient_grid() {
            m = m.max(g.max_abs());
        }
        m
    }

    pub fn dot(&self, other: &SpectralField) -> Result<f64> {
        self.check_same_basis(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scaled(&self, s: f64) -> SpectralField {
        self.map_modes(|_, c| s * c)
    }

    /// New field with coefficient `p` replaced by `f(p, û_p)`.
    pub fn map_modes(&self, f: impl Fn(usize, f64) -> f64) -> SpectralField {
        SpectralField {
            basis: self.basis.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(p, &c)| f(p, c))
                .collect(),
        }
    }

    fn zip_with(
        &self,
        other: &SpectralField,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<SpectralField> {
        self.check_same_basis(other)?;
        Ok(SpectralField {
            basis: self.basis.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }
}

impl GridField {
    pub fn new(basis: &Arc<Basis>, values: Vec<f64>) -> Result<Self> {
        if values.len() != basis.grid_len() {
            return Err(Error::DimensionMismatch {
                expected: basis.grid_len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("grid values"));
        }
        Ok(GridField {
            basis: basis.clone(),
            values,
        })
    }

    /// Sample `f(x)` at every node.
    pub fn from_fn(basis: &Arc<Basis>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let d = basis.dim();
        let values = (0..basis.grid_len())
            .map(|n| {
                let x: [f64; MAX_DIM] = basis.node(n);
                f(&x[..d])
            })
            .collect();
        Self::new(basis, values)
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Quadrature projection onto the basis.
    pub fn to_spectral(&self) -> SpectralField {
        SpectralField {
            basis: self.basis.clone(),
            coeffs: self.basis.analyze(&self.values),
        }
    }

    /// `(Σ_n w_n |u_n|^r)^{1/r}`
    pub fn lr_norm(&self, r: f64) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let s: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(n, v)| self.basis.weight(n) * (v.abs() / scale).powf(r))
            .sum();
        scale * s.powf(1.0 / r)
    }

    pub fn l2_norm(&self) -> f64 {
        self.lr_norm(2.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{BasisSpec, DomainKind};
    use super::*;
    use core::f64::consts::PI;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn uniform(rng: &mut ChaCha8Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    #[test]
    fn round_trip_random_p16() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for kind in [
            DomainKind::IntervalDirichlet,
            DomainKind::IntervalNeumann,
            DomainKind::Torus,
        ] {
            let b = Basis::build(BasisSpec::interval(kind, 16)).unwrap();
            let c: Vec<f64> = (0..b.len()).map(|_| uniform(&mut rng)).collect();
            let u = SpectralField::from_coeffs(&b, c).unwrap();
            let back = u.to_grid().to_spectral();
            let err = u
                .sub(&back)
                .unwrap()
                .coeffs()
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(err < 1e-10, "{kind:?}: {err}");
        }
    }

    #[test]
    fn orthonormal_and_parseval_all_kinds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in [
            DomainKind::IntervalDirichlet,
            DomainKind::IntervalNeumann,
            DomainKind::Torus,
        ] {
            for &p in &[4usize, 16, 64] {
                let b = Basis::build(BasisSpec::new(kind, vec![2.5], p)).unwrap();
                let grids: Vec<Vec<f64>> = (0..b.len())
                    .map(|i| SpectralField::unit(&b, i).to_grid().into_values())
                    .collect();
                for i in 0..b.len() {
                    for j in i..b.len() {
                        let g: f64 = (0..b.grid_len())
                            .map(|n| b.weight(n) * grids[i][n] * grids[j][n])
                            .sum();
                        let delta = if i == j { 1.0 } else { 0.0 };
                        assert!((g - delta).abs() <= 1e-10, "{kind:?} P={p} ({i},{j}) {g}");
                    }
                }
                let c: Vec<f64> = (0..b.len()).map(|_| uniform(&mut rng)).collect();
                let u = SpectralField::from_coeffs(&b, c).unwrap();
                let nodal = u.to_grid().l2_norm();
                assert!((nodal - u.l2_norm()).abs() <= 1e-9 * u.l2_norm());
            }
        }
    }

    #[test]
    fn parseval_in_three_dimensions() {
        let b = Basis::build(BasisSpec::new(DomainKind::Torus, vec![1.0, 2.0, 1.5], 4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c: Vec<f64> = (0..b.len()).map(|_| uniform(&mut rng)).collect();
        let u = SpectralField::from_coeffs(&b, c).unwrap();
        assert!((u.to_grid().l2_norm() - u.l2_norm()).abs() <= 1e-9 * u.l2_norm());
        let back = u.to_grid().to_spectral();
        assert!(u.sub(&back).unwrap().l2_norm() < 1e-12);
    }

    #[test]
    fn gradient_matches_pointwise_derivative() {
        let b = Basis::build(BasisSpec::new(
            DomainKind::IntervalDirichlet,
            vec![PI, 1.0],
            5,
        ))
        .unwrap();
        let u =
            SpectralField::from_coeffs(&b, (0..b.len()).map(|i| 1.0 / (1.0 + i as f64)).collect())
                .unwrap();
        let grads = u.gradient_grid();
        for n in [0, 7, 33] {
            let x = b.node(n);
            let mut g = [0.0; 2];
            for p in 0..b.len() {
                let gp = b.grad_mode(p, &x[..2]);
                g[0] += u.coeffs()[p] * gp[0];
                g[1] += u.coeffs()[p] * gp[1];
            }
            assert!((grads[0].values()[n] - g[0]).abs() < 1e-12);
            assert!((grads[1].values()[n] - g[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_rejects_non_finite() {
        let b = Basis::build(BasisSpec::interval(DomainKind::Torus, 2)).unwrap();
        let mut v = vec![0.0; b.grid_len()];
        v[1] = f64::NAN;
        assert!(matches!(GridField::new(&b, v), Err(Error::NonFinite(_))));
        assert!(matches!(
            GridField::new(&b, vec![0.0; 3]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mismatched_bases_rejected() {
        let a = Basis::build(BasisSpec::interval(DomainKind::Torus, 4)).unwrap();
        let b = Basis::build(BasisSpec::interval(DomainKind::IntervalNeumann, 4)).unwrap();
        let r = SpectralField::zeros(&a).sub(&SpectralField::zeros(&b));
        assert_eq!(r.unwrap_err(), Error::BasisMismatch);
    }
}
