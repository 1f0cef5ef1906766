//! Experiment configuration: a JSON document with `problem`,
//! `regularization`, `solver` and `outputs` sections, plus optional
//! `carleman` and `approx` blocks for the diagnostic subcommands.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qrev_core::basis::MAX_DIM;
use qrev_core::nonlinearity::Kappa;
use qrev_core::DomainKind;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemConfig>,
    #[serde(default)]
    pub regularization: RegularizationConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carleman: Option<CarlemanBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approx: Option<ApproxBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    /// `interval_dirichlet`, `interval_neumann` or `torus`.
    pub domain: String,
    #[serde(default = "default_lengths")]
    pub lengths: Vec<f64>,
    /// Modes per axis.
    pub modes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<usize>,
    pub a: f64,
    #[serde(rename = "M_bar")]
    pub m_bar: f64,
    #[serde(rename = "M_lower", default, skip_serializing_if = "Option::is_none")]
    pub m_lower: Option<f64>,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(default)]
    pub source: SourceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialConfig>,
}

fn default_lengths() -> Vec<f64> {
    vec![PI]
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    #[default]
    Zero,
    Sine,
    Fisher {
        #[serde(rename = "B")]
        b: f64,
    },
}

/// Initial state of the reference solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    /// Spectral coefficients in eigenvalue order; missing entries are zero.
    Coeffs(Vec<f64>),
    /// `∏ sin(π x_j / L_j)`
    Sine,
    /// `mean + amplitude · ∏ cos(π x_j / L_j)`
    Cosine { mean: f64, amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizationConfig {
    #[serde(rename = "K", default = "one")]
    pub k: f64,
    /// Defaults to `1/T`.
    #[serde(rename = "C1", default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(default)]
    pub eps: Vec<f64>,
    /// Direct `log γ` values, used by `tstar` when no `eps` are given.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub log_gamma: Vec<f64>,
    #[serde(default)]
    pub kappa: KappaConfig,
}

impl Default for RegularizationConfig {
    fn default() -> Self {
        RegularizationConfig {
            k: 1.0,
            c1: None,
            eps: Vec::new(),
            log_gamma: Vec::new(),
            kappa: KappaConfig::default(),
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KappaConfig {
    Named(String),
    Fixed(f64),
}

impl Default for KappaConfig {
    fn default() -> Self {
        KappaConfig::Named("auto".into())
    }
}

impl KappaConfig {
    pub fn policy(&self) -> Option<Kappa> {
        match self {
            KappaConfig::Named(s) if s == "auto" => Some(Kappa::Auto),
            KappaConfig::Named(_) => None,
            KappaConfig::Fixed(k) => Some(Kappa::Fixed(*k)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverPath {
    #[default]
    Direct,
    Volterra,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Defaults to `T / 2000`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default)]
    pub path: SolverPath,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// States are kept every `stride` steps.
    #[serde(default = "default_stride")]
    pub stride: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: None,
            path: SolverPath::Direct,
            tol: default_tol(),
            max_iter: default_max_iter(),
            stride: default_stride(),
        }
    }
}

fn default_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    500
}
fn default_stride() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    /// Defaults to `T/4, T/2, 3T/4`. A time of `0` is measured at `t^ε`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default = "default_r")]
    pub r: f64,
    /// Grid refinement factor for `L^r` norms.
    #[serde(default = "default_oversample")]
    pub oversample: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default)]
    pub seed: u64,
    /// Seeds of a sweep; defaults to `[seed]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default = "yes")]
    pub write_states: bool,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        OutputsConfig {
            times: None,
            r: default_r(),
            oversample: default_oversample(),
            dir: None,
            seed: 0,
            seeds: None,
            write_states: true,
        }
    }
}

fn default_r() -> f64 {
    4.0
}
fn default_oversample() -> usize {
    4
}
fn yes() -> bool {
    true
}

/// Weighted-energy check on `v = ∏ sin(π x_j / L_j) · t²(T - t)²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarlemanBlock {
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "one")]
    pub k: f64,
    #[serde(rename = "T", default = "default_carleman_t")]
    pub horizon: f64,
    #[serde(default = "one")]
    pub a: f64,
    #[serde(rename = "K", default = "default_carleman_k")]
    pub k_const: f64,
    /// Tested `m`, increasing.
    pub m: Vec<f64>,
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default = "default_intervals")]
    pub time_intervals: usize,
}

fn default_eta() -> f64 {
    0.05
}
fn default_carleman_t() -> f64 {
    0.1
}
fn default_carleman_k() -> f64 {
    10.0
}
fn default_modes() -> usize {
    8
}
fn default_intervals() -> usize {
    400
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxBlock {
    pub alpha: f64,
    pub q: f64,
    pub d: usize,
    pub n_max: usize,
    /// Fixed enumeration box; automatic when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_radius: Option<usize>,
}

/// A parsed configuration with its source text, for error locations.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub origin: String,
    text: String,
}

impl LoadedConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_str(&text, &path.display().to_string())
    }

    pub fn from_str(text: &str, origin: &str) -> Result<Self, CliError> {
        let config: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("{origin}:{}:{}: {e}", e.line(), e.column())))?;
        Ok(LoadedConfig {
            config,
            origin: origin.to_string(),
            text: text.to_string(),
        })
    }

    /// Error at the first occurrence of `"key"` in the source.
    pub fn error_at(&self, key: &str, msg: impl std::fmt::Display) -> CliError {
        let needle = format!("\"{key}\"");
        match self.text.lines().position(|l| l.contains(&needle)) {
            Some(line) => CliError::Config(format!("{}:{}: {key}: {msg}", self.origin, line + 1)),
            None => CliError::Config(format!("{}: {key}: {msg}", self.origin)),
        }
    }

    pub fn problem(&self) -> Result<&ProblemConfig, CliError> {
        self.config
            .problem
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("{}: missing section `problem`", self.origin)))
    }

    /// Fill defaults that depend on other fields and check every invariant
    /// needed by the problem-based subcommands.
    pub fn resolve(&mut self) -> Result<(), CliError> {
        let p = self.problem()?.clone();
        if DomainKind::from_name(&p.domain).is_none() {
            return Err(self.error_at("domain", format!("unknown domain kind `{}`", p.domain)));
        }
        if p.lengths.is_empty() || p.lengths.len() > MAX_DIM {
            return Err(self.error_at("lengths", format!("need 1 to {MAX_DIM} side lengths")));
        }
        if p.lengths.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
            return Err(self.error_at("lengths", "side lengths must be positive"));
        }
        if p.modes == 0 {
            return Err(self.error_at("modes", "must be at least 1"));
        }
        positive(self, "a", p.a)?;
        positive(self, "T", p.horizon)?;
        if !(p.m_bar > p.a) || !p.m_bar.is_finite() {
            return Err(self.error_at(
                "M_bar",
                format!("M_bar = {} must exceed a = {}", p.m_bar, p.a),
            ));
        }
        if let Some(m) = p.m_lower {
            positive(self, "M_lower", m)?;
        }
        if let SourceConfig::Fisher { b } = p.source {
            positive(self, "B", b)?;
        }
        let horizon = p.horizon;

        let reg = &self.config.regularization;
        positive(self, "K", reg.k)?;
        let c1 = reg.c1.unwrap_or(1.0 / horizon);
        positive(self, "C1", c1)?;
        if c1 * horizon > 1.0 + 1e-12 {
            return Err(self.error_at("C1", format!("C1·T = {} exceeds 1", c1 * horizon)));
        }
        if reg.eps.iter().any(|e| !(*e >= 0.0) || !e.is_finite()) {
            return Err(self.error_at("eps", "noise levels must be finite and nonnegative"));
        }
        if reg.eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(self.error_at("eps", "list must be strictly decreasing"));
        }
        if reg.kappa.policy().is_none() {
            return Err(self.error_at("kappa", "expected \"auto\" or a number in (0, 1/2]"));
        }
        if let KappaConfig::Fixed(k) = reg.kappa {
            if !(k > 0.0 && k <= 0.5) {
                return Err(self.error_at("kappa", format!("κ = {k} outside (0, 1/2]")));
            }
        }

        let s = &self.config.solver;
        let dt = s.dt.unwrap_or(horizon / 2000.0);
        let Some(steps) = steps_for(horizon, dt) else {
            return Err(self.error_at("dt", format!("Δt = {dt} does not divide T = {horizon}")));
        };
        if s.stride == 0 {
            return Err(self.error_at("stride", "must be at least 1"));
        }
        if !(s.tol > 0.0) {
            return Err(self.error_at("tol", "must be positive"));
        }
        let stored = dt * s.stride as f64;

        let o = &self.config.outputs;
        let times = o
            .times
            .clone()
            .unwrap_or_else(|| vec![horizon / 4.0, horizon / 2.0, 3.0 * horizon / 4.0]);
        for &t in &times {
            if !(0.0..=horizon).contains(&t) {
                return Err(self.error_at("times", format!("t = {t} outside [0, T]")));
            }
            let k = (t / stored).round();
            let on_grid =
                (k * stored - t).abs() <= 1e-9 * horizon || (t - horizon).abs() <= 1e-12 * horizon;
            if !on_grid || k as usize > steps {
                return Err(self.error_at(
                    "times",
                    format!("t = {t} is not a stored time (multiples of Δt·stride = {stored})"),
                ));
            }
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(self.error_at("times", "must be strictly increasing"));
        }
        if !(o.r > 2.0) {
            return Err(self.error_at("r", "need r > 2"));
        }
        if o.oversample == 0 {
            return Err(self.error_at("oversample", "must be at least 1"));
        }

        self.config.regularization.c1 = Some(c1);
        self.config.solver.dt = Some(dt);
        self.config.outputs.times = Some(times);
        let pm = self.config.problem.as_mut().expect("checked above");
        pm.m_lower = Some(p.m_lower.unwrap_or(p.a));
        pm.quadrature = Some(p.quadrature.unwrap_or(2 * p.modes));
        Ok(())
    }

    /// Check the `tstar` inputs: `C1` (defaulting to 1/T when a problem is
    /// given, else 1) and either `eps` or `log_gamma`.
    pub fn resolve_tstar(&mut self) -> Result<(), CliError> {
        let horizon = self.config.problem.as_ref().map(|p| p.horizon);
        let reg = &self.config.regularization;
        let c1 = reg.c1.unwrap_or(horizon.map_or(1.0, |t| 1.0 / t));
        positive(self, "C1", c1)?;
        positive(self, "K", reg.k)?;
        if reg.eps.is_empty() && reg.log_gamma.is_empty() {
            return Err(self.error_at("regularization", "give `eps` or `log_gamma`"));
        }
        if reg.eps.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
            return Err(self.error_at("eps", "noise levels must be positive for the t^ε rule"));
        }
        if reg.eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(self.error_at("eps", "list must be strictly decreasing"));
        }
        if !reg.eps.is_empty() && horizon.is_none() {
            return Err(self.error_at("eps", "need `problem.T` to turn ε into γ"));
        }
        self.config.regularization.c1 = Some(c1);
        Ok(())
    }

    pub fn carleman(&self) -> Result<&CarlemanBlock, CliError> {
        let c = self.config.carleman.as_ref().ok_or_else(|| {
            CliError::Config(format!("{}: missing section `carleman`", self.origin))
        })?;
        for (key, v) in [
            ("eta", c.eta),
            ("k", c.k),
            ("T", c.horizon),
            ("a", c.a),
            ("K", c.k_const),
        ] {
            positive(self, key, v)?;
        }
        if c.m.is_empty() || c.m.iter().any(|m| !(*m > 0.0)) || c.m.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(self.error_at("m", "need a nonempty increasing list of positive values"));
        }
        Ok(c)
    }

    pub fn approx(&self) -> Result<&ApproxBlock, CliError> {
        let a = self.config.approx.as_ref().ok_or_else(|| {
            CliError::Config(format!("{}: missing section `approx`", self.origin))
        })?;
        positive(self, "alpha", a.alpha)?;
        positive(self, "q", a.q)?;
        if a.d == 0 {
            return Err(self.error_at("d", "must be at least 1"));
        }
        if a.n_max == 0 {
            return Err(self.error_at("n_max", "must be at least 1"));
        }
        Ok(a)
    }

    /// SHA-256 of the resolved configuration serialized as compact JSON.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(&self.config).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn source_digest(&self) -> String {
        hex::encode(Sha256::digest(self.text.as_bytes()))
    }
}

fn positive(cfg: &LoadedConfig, key: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(cfg.error_at(key, format!("must be positive and finite, got {v}")))
    }
}

pub(crate) fn steps_for(horizon: f64, dt: f64) -> Option<usize> {
    if !(dt > 0.0) {
        return None;
    }
    let n = (horizon / dt).round();
    if !(1.0..=1e9).contains(&n) || (n * dt - horizon).abs() > 1e-9 * horizon {
        return None;
    }
    Some(n as usize)
}
