//! Laplacian eigenbases on boxes and tori.
//!
//! A [`Basis`] is a tensor product of one-dimensional families (sine for
//! homogeneous Dirichlet, cosine for homogeneous Neumann, real trigonometric
//! for periodic axes), each normalized in `L²` of its axis. The product modes
//! are stored sorted by eigenvalue so that coefficient `p` of a
//! [`SpectralField`] always refers to the `p`-th smallest eigenvalue `μ_p` of
//! `-Δ`; ties are broken by the per-axis slot indices in lexicographic order.
//!
//! Every axis carries a uniform quadrature rule exact for products of two
//! basis functions, which makes nodal/spectral conversion exact to rounding:
//!
//! | family    | nodes                         | weights                |
//! |-----------|-------------------------------|------------------------|
//! | Dirichlet | midpoints `(j + ½) L / N`     | `L / N`                |
//! | Neumann   | endpoints-included `j L/(N-1)`| trapezoid `L / (N-1)`  |
//! | periodic  | `j L / N`                     | `L / N`                |

mod field;
mod gevrey;

pub use field::{GridField, SpectralField};
pub use gevrey::{approximation_numbers, approximation_numbers_in_box, ENUMERATION_BUDGET};

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainKind {
    /// Box with homogeneous Dirichlet data on every face.
    IntervalDirichlet,
    /// Box with homogeneous Neumann (no-flux) data on every face.
    IntervalNeumann,
    /// Periodic box `∏ [0, L_j)`.
    Torus,
}

impl DomainKind {
    pub fn name(self) -> &'static str {
        match self {
            DomainKind::IntervalDirichlet => "interval_dirichlet",
            DomainKind::IntervalNeumann => "interval_neumann",
            DomainKind::Torus => "torus",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "interval_dirichlet" | "dirichlet" => Some(DomainKind::IntervalDirichlet),
            "interval_neumann" | "neumann" => Some(DomainKind::IntervalNeumann),
            "torus" | "torus_d" | "periodic" => Some(DomainKind::Torus),
            _ => None,
        }
    }

    /// Whether constant functions belong to the span of the basis.
    pub fn represents_constants(self) -> bool {
        !matches!(self, DomainKind::IntervalDirichlet)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    pub kind: DomainKind,
    /// Side lengths, one per axis; the number of entries is the dimension.
    pub lengths: Vec<f64>,
    /// Number of one-dimensional modes per axis.
    pub modes_per_axis: usize,
    /// Quadrature nodes per axis, at least `2 * modes_per_axis`.
    pub quadrature_points: usize,
}

impl BasisSpec {
    pub fn new(kind: DomainKind, lengths: Vec<f64>, modes_per_axis: usize) -> Self {
        BasisSpec {
            kind,
            lengths,
            modes_per_axis,
            quadrature_points: 2 * modes_per_axis.max(1),
        }
    }

    /// `[0, π]` with `modes` modes, the default test domain.
    pub fn interval(kind: DomainKind, modes: usize) -> Self {
        Self::new(kind, vec![PI], modes)
    }

    pub fn with_quadrature(mut self, points: usize) -> Self {
        self.quadrature_points = points;
        self
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 || d > MAX_DIM {
            return Err(Error::InvalidBasis(format!(
                "dimension {d} outside 1..={MAX_DIM}"
            )));
        }
        if self.modes_per_axis < 1 {
            return Err(Error::InvalidBasis("mode count must be at least 1".into()));
        }
        if let Some(l) = self.lengths.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidBasis(format!("non-positive side length {l}")));
        }
        if self.quadrature_points < 2 * self.modes_per_axis || self.quadrature_points < 2 {
            return Err(Error::InvalidBasis(format!(
                "{} quadrature points per axis, need at least {}",
                self.quadrature_points,
                (2 * self.modes_per_axis).max(2)
            )));
        }
        Ok(())
    }
}

/// One product mode of the basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// One-dimensional slot per axis (unused axes are 0).
    pub slots: [usize; MAX_DIM],
    pub eigenvalue: f64,
    dense: usize,
}

#[derive(Debug, Clone)]
struct Axis {
    length: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `values[n * P + j] = φ_j(x_n)`
    values: Vec<f64>,
    /// `derivs[n * P + j] = φ_j'(x_n)`
    derivs: Vec<f64>,
    /// `analysis[j * N + n] = φ_j(x_n) w_n`
    analysis: Vec<f64>,
    eigen: Vec<f64>,
}

impl Axis {
    fn build(kind: DomainKind, length: f64, modes: usize, points: usize) -> Self {
        let (nodes, weights): (Vec<f64>, Vec<f64>) = match kind {
            DomainKind::IntervalDirichlet => {
                let h = length / points as f64;
                (0..points).map(|j| ((j as f64 + 0.5) * h, h)).unzip()
            }
            DomainKind::IntervalNeumann => {
                let h = length / (points - 1) as f64;
                (0..points)
                    .map(|j| {
                        let w = if j == 0 || j == points - 1 {
                            0.5 * h
                        } else {
                            h
                        };
                        (j as f64 * h, w)
                    })
                    .unzip()
            }
            DomainKind::Torus => {
                let h = length / points as f64;
                (0..points).map(|j| (j as f64 * h, h)).unzip()
            }
        };
        let eigen = (0..modes)
            .map(|j| axis_eigenvalue(kind, length, j))
            .collect();
        let mut values = vec![0.0; points * modes];
        let mut derivs = vec![0.0; points * modes];
        let mut analysis = vec![0.0; points * modes];
        for (n, (&x, &w)) in nodes.iter().zip(&weights).enumerate() {
            for j in 0..modes {
                let (v, dv) = axis_function(kind, length, j, x);
                values[n * modes + j] = v;
                derivs[n * modes + j] = dv;
                analysis[j * points + n] = v * w;
            }
        }
        Axis {
            length,
            nodes,
            weights,
            values,
            derivs,
            analysis,
            eigen,
        }
    }

    fn modes(&self) -> usize {
        self.eigen.len()
    }

    fn points(&self) -> usize {
        self.nodes.len()
    }
}

fn axis_wavenumber(kind: DomainKind, length: f64, slot: usize) -> f64 {
    match kind {
        DomainKind::IntervalDirichlet => (slot + 1) as f64 * PI / length,
        DomainKind::IntervalNeumann => slot as f64 * PI / length,
        DomainKind::Torus => slot.div_ceil(2) as f64 * 2.0 * PI / length,
    }
}

fn axis_eigenvalue(kind: DomainKind, length: f64, slot: usize) -> f64 {
    let k = axis_wavenumber(kind, length, slot);
    k * k
}

/// Value and derivative of the normalized one-dimensional basis function.
fn axis_function(kind: DomainKind, length: f64, slot: usize, x: f64) -> (f64, f64) {
    let k = axis_wavenumber(kind, length, slot);
    let c = (2.0 / length).sqrt();
    match kind {
        DomainKind::IntervalDirichlet => (c * (k * x).sin(), c * k * (k * x).cos()),
        DomainKind::IntervalNeumann | DomainKind::Torus if slot == 0 => (1.0 / length.sqrt(), 0.0),
        DomainKind::IntervalNeumann => (c * (k * x).cos(), -c * k * (k * x).sin()),
        DomainKind::Torus if slot % 2 == 1 => (c * (k * x).cos(), -c * k * (k * x).sin()),
        DomainKind::Torus => (c * (k * x).sin(), c * k * (k * x).cos()),
    }
}

/// Signed frequency label of a one-dimensional slot: sine/cosine index for
/// intervals, `+k` for `cos(2πkx/L)` and `-k` for `sin(2πkx/L)` on a torus.
fn axis_frequency(kind: DomainKind, slot: usize) -> i64 {
    match kind {
        DomainKind::IntervalDirichlet => slot as i64 + 1,
        DomainKind::IntervalNeumann => slot as i64,
        DomainKind::Torus => {
            let k = slot.div_ceil(2) as i64;
            if slot.is_multiple_of(2) {
                -k
            } else {
                k
            }
        }
    }
}

#[derive(Debug)]
pub struct Basis {
    spec: BasisSpec,
    axes: Vec<Axis>,
    modes: Vec<Mode>,
    /// position in `modes` of every dense tensor index
    sorted_of_dense: Vec<usize>,
    grid_len: usize,
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Basis {
    pub fn build(spec: BasisSpec) -> Result<Arc<Basis>> {
        spec.validate()?;
        let d = spec.dim();
        let p = spec.modes_per_axis;
        let axes: Vec<Axis> = spec
            .lengths
            .iter()
            .map(|&l| Axis::build(spec.kind, l, p, spec.quadrature_points))
            .collect();
        let dense_len = p.pow(d as u32);
        let mut modes: Vec<Mode> = (0..dense_len)
            .map(|dense| {
                let mut slots = [0usize; MAX_DIM];
                let mut rest = dense;
                for axis in (0..d).rev() {
                    slots[axis] = rest % p;
                    rest /= p;
                }
                let eigenvalue = (0..d).map(|a| axes[a].eigen[slots[a]]).sum();
                Mode {
                    slots,
                    eigenvalue,
                    dense,
                }
            })
            .collect();
        modes.sort_by(|a, b| {
            a.eigenvalue
                .total_cmp(&b.eigenvalue)
                .then(a.dense.cmp(&b.dense))
        });
        let mut sorted_of_dense = vec![0; dense_len];
        for (i, m) in modes.iter().enumerate() {
            sorted_of_dense[m.dense] = i;
        }
        let grid_len = spec.quadrature_points.pow(d as u32);
        Ok(Arc::new(Basis {
            spec,
            axes,
            modes,
            sorted_of_dense,
            grid_len,
        }))
    }

    /// Same modes, different number of quadrature nodes per axis.
    pub fn with_quadrature(&self, points: usize) -> Result<Arc<Basis>> {
        Basis::build(self.spec.clone().with_quadrature(points))
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn kind(&self) -> DomainKind {
        self.spec.kind
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// Total number of product modes (`P^d`).
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Number of grid nodes (`N^d`).
    pub fn grid_len(&self) -> usize {
        self.grid_len
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn eigenvalue(&self, mode: usize) -> f64 {
        self.modes[mode].eigenvalue
    }

    pub fn eigenvalues(&self) -> impl Iterator<Item = f64> + Clone + '_ {
        self.modes.iter().map(|m| m.eigenvalue)
    }

    /// Whether both bases share the same modes (quadrature may differ).
    pub fn same_modes(&self, other: &Basis) -> bool {
        self.spec.kind == other.spec.kind
            && self.spec.lengths == other.spec.lengths
            && self.spec.modes_per_axis == other.spec.modes_per_axis
    }

    /// Signed per-axis frequency labels of a mode (see the module docs).
    pub fn frequencies(&self, mode: usize) -> Vec<i64> {
        let m = &self.modes[mode];
        (0..self.dim())
            .map(|a| axis_frequency(self.spec.kind, m.slots[a]))
            .collect()
    }

    /// Position of the mode carrying the given per-axis frequency labels.
    pub fn find_mode(&self, freqs: &[i64]) -> Option<usize> {
        if freqs.len() != self.dim() {
            return None;
        }
        (0..self.len()).find(|&i| self.frequencies(i) == freqs)
    }

    /// Coordinates of grid node `n`.
    pub fn node(&self, n: usize) -> [f64; MAX_DIM] {
        let mut x = [0.0; MAX_DIM];
        let np = self.spec.quadrature_points;
        let mut rest = n;
        for a in (0..self.dim()).rev() {
            x[a] = self.axes[a].nodes[rest % np];
            rest /= np;
        }
        x
    }

    /// Quadrature weight of grid node `n`.
    pub fn weight(&self, n: usize) -> f64 {
        let np = self.spec.quadrature_points;
        let mut rest = n;
        let mut w = 1.0;
        for a in (0..self.dim()).rev() {
            w *= self.axes[a].weights[rest % np];
            rest /= np;
        }
        w
    }

    /// Value of basis function `mode` at an arbitrary point.
    pub fn eval_mode(&self, mode: usize, x: &[f64]) -> f64 {
        let m = &self.modes[mode];
        (0..self.dim())
            .map(|a| axis_function(self.spec.kind, self.axes[a].length, m.slots[a], x[a]).0)
            .product()
    }

    /// Gradient of basis function `mode` at an arbitrary point.
    pub fn grad_mode(&self, mode: usize, x: &[f64]) -> [f64; MAX_DIM] {
        let m = &self.modes[mode];
        let d = self.dim();
        let vals: Vec<(f64, f64)> = (0..d)
            .map(|a| axis_function(self.spec.kind, self.axes[a].length, m.slots[a], x[a]))
            .collect();
        let mut g = [0.0; MAX_DIM];
        for (k, gk) in g.iter_mut().enumerate().take(d) {
            *gk = (0..d)
                .map(|a| if a == k { vals[a].1 } else { vals[a].0 })
                .product();
        }
        g
    }

    fn to_dense(&self, coeffs: &[f64]) -> Vec<f64> {
        (0..coeffs.len())
            .map(|dense| coeffs[self.sorted_of_dense[dense]])
            .collect()
    }

    fn gather_dense(&self, dense: &[f64]) -> Vec<f64> {
        self.modes.iter().map(|m| dense[m.dense]).collect()
    }

    /// Sampling of `Σ c_p ∂^{deriv} φ_p` on the grid; `deriv = Some(k)` takes the
    /// derivative along axis `k`.
    fn synthesize(&self, coeffs: &[f64], deriv: Option<usize>) -> Vec<f64> {
        let d = self.dim();
        let mut shape: Vec<usize> = vec![self.spec.modes_per_axis; d];
        let mut data = self.to_dense(coeffs);
        for a in 0..d {
            let axis = &self.axes[a];
            let mat = if deriv == Some(a) {
                &axis.derivs
            } else {
                &axis.values
            };
            data = contract(&data, &mut shape, a, mat, axis.points(), axis.modes());
        }
        data
    }

    pub(crate) fn synthesize_values(&self, coeffs: &[f64]) -> Vec<f64> {
        self.synthesize(coeffs, None)
    }

    pub(crate) fn synthesize_derivative(&self, coeffs: &[f64], axis: usize) -> Vec<f64> {
        self.synthesize(coeffs, Some(axis))
    }

    pub(crate) fn analyze(&self, values: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut shape: Vec<usize> = vec![self.spec.quadrature_points; d];
        let mut data = values.to_vec();
        for a in 0..d {
            let axis = &self.axes[a];
            data = contract(
                &data,
                &mut shape,
                a,
                &axis.analysis,
                axis.modes(),
                axis.points(),
            );
        }
        self.gather_dense(&data)
    }

    /// `∫_{∂Ω} |Σ c_p φ_p|²`, evaluated face by face with the tensor quadrature
    /// of the remaining axes. In one dimension this is `u(0)² + u(L)²`.
    pub fn boundary_l2_squared(&self, coeffs: &[f64]) -> f64 {
        let d = self.dim();
        let p = self.spec.modes_per_axis;
        let mut total = 0.0;
        for face_axis in 0..d {
            let length = self.axes[face_axis].length;
            for &end in &[0.0, length] {
                let row: Vec<f64> = (0..p)
                    .map(|j| axis_function(self.spec.kind, length, j, end).0)
                    .collect();
                let mut shape: Vec<usize> = vec![p; d];
                let mut data = self.to_dense(coeffs);
                for a in 0..d {
                    let axis = &self.axes[a];
                    data = if a == face_axis {
                        contract(&data, &mut shape, a, &row, 1, p)
                    } else {
                        contract(&data, &mut shape, a, &axis.values, axis.points(), p)
                    };
                }
                // integrate the squared trace over the other axes
                let np = self.spec.quadrature_points;
                for (idx, v) in data.iter().enumerate() {
                    let mut rest = idx;
                    let mut w = 1.0;
                    for a in (0..d).rev() {
                        let n = shape[a];
                        if a != face_axis {
                            w *= self.axes[a].weights[rest % np];
                        }
                        rest /= n;
                    }
                    total += w * v * v;
                }
            }
        }
        total
    }
}

/// Apply `mat` (`out × inp`, row-major) along `axis` of a row-major tensor.
fn contract(
    data: &[f64],
    shape: &mut [usize],
    axis: usize,
    mat: &[f64],
    out: usize,
    inp: usize,
) -> Vec<f64> {
    debug_assert_eq!(shape[axis], inp);
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut result = vec![0.0; outer * out * inner];
    for o in 0..outer {
        for i in 0..out {
            let row = &mat[i * inp..(i + 1) * inp];
            let dst = &mut result[(o * out + i) * inner..(o * out + i + 1) * inner];
            for (j, &m) in row.iter().enumerate() {
                if m == 0.0 {
                    continue;
                }
                let src = &data[(o * inp + j) * inner..(o * inp + j + 1) * inner];
                for (r, s) in dst.iter_mut().zip(src) {
                    *r += m * s;
                }
            }
        }
    }
    shape[axis] = out;
    result
}
