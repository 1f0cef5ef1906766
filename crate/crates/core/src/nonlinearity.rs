//! Source terms `F(x, t; u)`, the clamping cut-off `F_ℓ`, Lipschitz constants
//! and the noise-dependent cut-off schedule.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::basis::{GridField, SpectralField, MAX_DIM};
use crate::filter::FilterParams;
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Manufactured forcing `g(x, t)`.
pub type SourceFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceKind {
    Zero,
    PureSource,
    /// `F = sin u`
    Sine,
    /// `F = B u (1 - u)`
    Fisher {
        b: f64,
    },
    SinePlusSource,
    FisherPlusSource {
        b: f64,
    },
}

impl SourceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SourceKind::Zero => "zero",
            SourceKind::PureSource => "pure_source",
            SourceKind::Sine => "sine",
            SourceKind::Fisher { .. } => "fisher",
            SourceKind::SinePlusSource => "sine_plus_source",
            SourceKind::FisherPlusSource { .. } => "fisher_plus_source",
        }
    }

    fn has_source(&self) -> bool {
        matches!(
            self,
            SourceKind::PureSource
                | SourceKind::SinePlusSource
                | SourceKind::FisherPlusSource { .. }
        )
    }

    fn fisher_b(&self) -> Option<f64> {
        match *self {
            SourceKind::Fisher { b } | SourceKind::FisherPlusSource { b } => Some(b),
            _ => None,
        }
    }

    /// The `u`-dependent part, without any forcing.
    fn reaction(&self, u: f64) -> f64 {
        match *self {
            SourceKind::Zero | SourceKind::PureSource => 0.0,
            SourceKind::Sine | SourceKind::SinePlusSource => u.sin(),
            SourceKind::Fisher { b } | SourceKind::FisherPlusSource { b } => b * u * (1.0 - u),
        }
    }
}

#[derive(Clone)]
pub struct SourceSpec {
    kind: SourceKind,
    g: Option<SourceFn>,
    /// cut-off level `ℓ`; `None` means no clamping
    cutoff: Option<f64>,
}

impl fmt::Debug for SourceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SourceSpec")
            .field("kind", &self.kind)
            .field("g", &self.g.as_ref().map(|_| "<fn>"))
            .field("cutoff", &self.cutoff)
            .finish()
    }
}

impl SourceSpec {
    /// Build a source of the given kind; kinds ending in `_source` need `g`.
    pub fn new(kind: SourceKind, g: Option<SourceFn>) -> Result<Self> {
        if let Some(b) = kind.fisher_b() {
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::param("B", "Fisher coefficient must be positive"));
            }
        }
        match (kind.has_source(), g.is_some()) {
            (true, false) => Err(Error::param(
                "g",
                format!("{} needs a forcing term", kind.name()),
            )),
            (false, true) => Err(Error::param(
                "g",
                format!("{} takes no forcing term", kind.name()),
            )),
            _ => Ok(SourceSpec {
                kind,
                g,
                cutoff: None,
            }),
        }
    }

    pub fn zero() -> Self {
        SourceSpec {
            kind: SourceKind::Zero,
            g: None,
            cutoff: None,
        }
    }

    pub fn sine() -> Self {
        SourceSpec {
            kind: SourceKind::Sine,
            g: None,
            cutoff: None,
        }
    }

    pub fn fisher(b: f64) -> Result<Self> {
        Self::new(SourceKind::Fisher { b }, None)
    }

    pub fn pure_source(g: SourceFn) -> Self {
        SourceSpec {
            kind: SourceKind::PureSource,
            g: Some(g),
            cutoff: None,
        }
    }

    pub fn kind(&self) -> SourceKind {
        self.kind
    }

    pub fn cutoff(&self) -> Option<f64> {
        self.cutoff
    }

    /// `F ≡ 0`, so linear propagation is exact.
    pub fn is_zero(&self) -> bool {
        self.kind == SourceKind::Zero
    }

    pub fn forcing(&self) -> Option<&SourceFn> {
        self.g.as_ref()
    }

    /// `F_ℓ(u) = F(clamp(u, -ℓ, ℓ))`; `ℓ = ∞` removes the cut-off.
    pub fn with_cutoff(&self, ell: f64) -> Result<Self> {
        if !(ell > 0.0) {
            return Err(Error::param(
                "ell",
                format!("cut-off level must be positive, got {ell}"),
            ));
        }
        let mut s = self.clone();
        s.cutoff = if ell.is_finite() { Some(ell) } else { None };
        Ok(s)
    }

    fn clamp(&self, u: f64) -> f64 {
        match self.cutoff {
            Some(l) => u.clamp(-l, l),
            None => u,
        }
    }

    /// `F(x, t; u)`, including the cut-off if one is set.
    pub fn eval(&self, x: &[f64], t: f64, u: f64) -> f64 {
        let r = self.kind.reaction(self.clamp(u));
        match &self.g {
            Some(g) => r + g(x, t),
            None => r,
        }
    }

    /// The `u`-dependent part `F_ℓ(u)` alone.
    pub fn reaction(&self, u: f64) -> f64 {
        self.kind.reaction(self.clamp(u))
    }

    /// Analytic Lipschitz constant of `F` on `|u| ≤ ℓ`.
    pub fn lipschitz(&self, ell: f64) -> f64 {
        match self.kind {
            SourceKind::Zero | SourceKind::PureSource => 0.0,
            SourceKind::Sine | SourceKind::SinePlusSource => 1.0,
            SourceKind::Fisher { b } | SourceKind::FisherPlusSource { b } => b * (1.0 + 2.0 * ell),
        }
    }

    /// Global Lipschitz constant of the (possibly cut-off) source.
    pub fn effective_lipschitz(&self) -> f64 {
        self.lipschitz(self.cutoff.unwrap_or(f64::INFINITY))
    }

    /// Nodal samples of `F(x, t; u(x))`.
    pub fn eval_grid(&self, u: &GridField, t: f64) -> Result<GridField> {
        let basis = u.basis();
        let d = basis.dim();
        let values = u
            .values()
            .iter()
            .enumerate()
            .map(|(n, &v)| {
                let x: [f64; MAX_DIM] = basis.node(n);
                self.eval(&x[..d], t, v)
            })
            .collect();
        GridField::new(basis, values)
    }

    /// Spectral projection of `F(·, t; u)`, or `None` when a non-finite value
    /// appears on the grid.
    pub fn project(&self, u: &SpectralField, t: f64) -> Option<SpectralField> {
        if self.is_zero() {
            return Some(SpectralField::zeros(u.basis()));
        }
        self.eval_grid(&u.to_grid(), t)
            .ok()
            .map(|g| g.to_spectral())
    }

    /// Whether `F(x, t; 0) = 0` at every node of `grid_of` for the given times.
    pub fn vanishes_at_zero(&self, grid_of: &SpectralField, times: &[f64]) -> bool {
        if self.kind.reaction(0.0) != 0.0 {
            return false;
        }
        let Some(g) = &self.g else {
            return true;
        };
        let basis = grid_of.basis();
        let d = basis.dim();
        times.iter().all(|&t| {
            (0..basis.grid_len()).all(|n| {
                let x = basis.node(n);
                g(&x[..d], t) == 0.0
            })
        })
    }
}

/// Sampled Lipschitz constant with the spacing it was measured at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzEstimate {
    /// Largest difference quotient seen; a lower bound of the true constant.
    pub value: f64,
    pub resolution: f64,
}

/// Largest `|f(u_{i+1}) - f(u_i)| / h` over a uniform grid of `samples`
/// intervals on `[lo, hi]`.
pub fn sampled_lipschitz(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<LipschitzEstimate> {
    if !(hi > lo) || samples == 0 {
        return Err(Error::param(
            "samples",
            "need hi > lo and at least one interval",
        ));
    }
    let h = (hi - lo) / samples as f64;
    let mut prev = f(lo);
    let mut best = 0.0f64;
    for i in 1..=samples {
        let cur = f(lo + i as f64 * h);
        best = best.max((cur - prev).abs() / h);
        prev = cur;
    }
    Ok(LipschitzEstimate {
        value: best,
        resolution: h,
    })
}

/// Sampled `L_F(ℓ)` on `[-ℓ, ℓ]` for increasing levels, made nondecreasing by a
/// running maximum so that it can be inverted.
pub fn sampled_lipschitz_profile(
    f: impl Fn(f64) -> f64,
    levels: &[f64],
    samples: usize,
) -> Result<Vec<LipschitzEstimate>> {
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("levels", "must be strictly increasing"));
    }
    let mut running = 0.0f64;
    levels
        .iter()
        .map(|&l| {
            let mut e = sampled_lipschitz(&f, -l, l, samples)?;
            running = running.max(e.value);
            e.value = running;
            Ok(e)
        })
        .collect()
}

/// Exponent `κ` of the cut-off schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa {
    /// `κ(t) = min(C1 t, 1/2)`
    Auto,
    Fixed(f64),
}

impl Kappa {
    pub fn resolve(self, c1: f64, t: f64) -> Result<f64> {
        let k = match self {
            Kappa::Auto => (c1 * t).min(0.5),
            Kappa::Fixed(k) => k,
        };
        if k > 0.0 && k <= 0.5 {
            Ok(k)
        } else {
            Err(Error::param("kappa", format!("κ = {k} outside (0, 1/2]")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    /// `Λ`; `+∞` for globally Lipschitz kinds.
    pub ell: f64,
    pub kappa: f64,
    pub m_lower: f64,
    /// `ϱ = sqrt((M̲/T) log(log^κ γ))`
    pub varrho: f64,
}

/// Largest cut-off level whose Lipschitz constant stays below `ϱ`.
///
/// `reference_w1inf`, when known, is `‖u‖_{L^∞(W^{1,∞})}` of the exact
/// solution; a level below it is reported as infeasible.
pub fn cutoff_schedule(
    params: &FilterParams,
    source: &SourceSpec,
    m_lower: f64,
    t: f64,
    kappa: Kappa,
    reference_w1inf: Option<f64>,
) -> Result<CutoffSpec> {
    if !(m_lower > 0.0) {
        return Err(Error::param("M_lower", "must be positive"));
    }
    let kappa = kappa.resolve(params.c1, t)?;
    if !(params.log_gamma > 1.0) {
        return Err(Error::InfeasibleSchedule(format!(
            "log γ = {} must exceed 1 for log(log^κ γ) > 0",
            params.log_gamma
        )));
    }
    let inner = kappa * params.log_gamma.ln();
    let varrho = (m_lower / params.horizon * inner).sqrt();
    let ell = match source.kind.fisher_b() {
        None => f64::INFINITY,
        Some(b) => {
            if varrho <= b {
                return Err(Error::InfeasibleSchedule(format!(
                    "ϱ = {varrho} does not exceed B = {b}"
                )));
            }
            (varrho / b - 1.0) / 2.0
        }
    };
    if let Some(w) = reference_w1inf {
        if ell < w {
            return Err(Error::InfeasibleSchedule(format!(
                "Λ = {ell} is below the reference W^(1,∞) norm {w}"
            )));
        }
    }
    Ok(CutoffSpec {
        ell,
        kappa,
        m_lower,
        varrho,
    })
}
