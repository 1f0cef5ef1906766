//! Subcommand drivers. Each driver reads a resolved configuration, runs the
//! core routines and writes its tables, field files and metadata under the
//! output directory.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde_json::json;

use qrev_core::analysis::{
    carleman_sweep, cutoff_error_bound, error_bound, fit_rate, lr_error, trapezoid,
    tstar_error_bound, tstar_solve, CarlemanConfig, ErrorRecord, SeparableField,
};
use qrev_core::basis::{approximation_numbers, approximation_numbers_in_box};
use qrev_core::forward::{add_noise, solve_forward};
use qrev_core::nonlinearity::{cutoff_schedule, Kappa};
use qrev_core::solver::{AmplificationAudit, VolterraOptions};
use qrev_core::{
    BackwardRun, Basis, BasisSpec, DomainKind, FilterParams, GridField, ProblemSpec,
    RegularizedProblem, RhoMode, SourceSpec, SpectralField,
};

use crate::config::{
    ExperimentConfig, InitialConfig, LoadedConfig, ProblemConfig, SolverPath, SourceConfig,
};
use crate::error::CliError;
use crate::fieldfile::{self, FieldHeader};
use crate::table::{self, num};

/// Command-line overrides shared by the subcommands.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub data: Option<PathBuf>,
}

/// What a driver produced, for the caller's log.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
}

pub fn basis_for(p: &ProblemConfig) -> Result<Arc<Basis>, CliError> {
    let kind = DomainKind::from_name(&p.domain)
        .ok_or_else(|| CliError::Config(format!("unknown domain kind `{}`", p.domain)))?;
    let mut spec = BasisSpec::new(kind, p.lengths.clone(), p.modes);
    if let Some(q) = p.quadrature {
        spec = spec.with_quadrature(q);
    }
    Ok(Basis::build(spec)?)
}

pub fn source_for(p: &ProblemConfig) -> Result<SourceSpec, CliError> {
    Ok(match p.source {
        SourceConfig::Zero => SourceSpec::zero(),
        SourceConfig::Sine => SourceSpec::sine(),
        SourceConfig::Fisher { b } => SourceSpec::fisher(b)?,
    })
}

pub fn problem_for(p: &ProblemConfig) -> Result<ProblemSpec, CliError> {
    let spec = ProblemSpec::new(basis_for(p)?, p.a, p.m_bar, p.horizon, source_for(p)?)?;
    Ok(spec.with_m_lower(p.m_lower.unwrap_or(p.a))?)
}

pub fn initial_for(p: &ProblemConfig, basis: &Arc<Basis>) -> Result<SpectralField, CliError> {
    let init = p
        .initial
        .as_ref()
        .ok_or_else(|| CliError::Config("missing `problem.initial`".into()))?;
    let lengths = &basis.spec().lengths;
    let field = match init {
        InitialConfig::Coeffs(c) => {
            if c.len() > basis.len() {
                return Err(CliError::Config(format!(
                    "`initial.coeffs` has {} entries, the basis only {}",
                    c.len(),
                    basis.len()
                )));
            }
            let mut v = c.clone();
            v.resize(basis.len(), 0.0);
            SpectralField::from_coeffs(basis, v)?
        }
        InitialConfig::Sine => GridField::from_fn(basis, |x| {
            lengths
                .iter()
                .zip(x)
                .map(|(l, xi)| (PI * xi / l).sin())
                .product()
        })?
        .to_spectral(),
        InitialConfig::Cosine { mean, amplitude } => GridField::from_fn(basis, |x| {
            mean + amplitude
                * lengths
                    .iter()
                    .zip(x)
                    .map(|(l, xi)| (PI * xi / l).cos())
                    .product::<f64>()
        })?
        .to_spectral(),
    };
    Ok(chop(field))
}

/// Zero coefficients at rounding level so that projected smooth profiles
/// keep a finite Gevrey norm.
fn chop(u: SpectralField) -> SpectralField {
    let floor = 1e-13 * u.l2_norm();
    u.map_modes(|_, c| if c.abs() <= floor { 0.0 } else { c })
}

fn out_dir(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<PathBuf, CliError> {
    let dir = opts
        .out
        .clone()
        .or_else(|| cfg.outputs.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    Ok(dir)
}

fn write_meta(
    dir: &Path,
    command: &str,
    cfg: &LoadedConfig,
    seeds: &[u64],
    files: &[String],
    started: Instant,
) -> Result<(), CliError> {
    let meta = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config_sha256": cfg.digest(),
        "source_sha256": cfg.source_digest(),
        "seeds": seeds,
        "files": files,
        "config": cfg.config,
    });
    let path = dir.join("meta.json");
    table::write_text(
        &path,
        &(serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n"),
    )?;
    let timing = json!({
        "wall_seconds": started.elapsed().as_secs_f64(),
        "threads": rayon::current_num_threads(),
    });
    let path = dir.join("timing.json");
    table::write_text(
        &path,
        &(serde_json::to_string_pretty(&timing).expect("timing serializes") + "\n"),
    )
}

/// Stored-time grid of a run with the configured step and stride.
struct Grid {
    dt: f64,
    stride: usize,
}

impl Grid {
    fn of(cfg: &ExperimentConfig) -> Self {
        Grid {
            dt: cfg.solver.dt.expect("resolved"),
            stride: cfg.solver.stride,
        }
    }
}

/// Exact solution sampled on the backward run's storage grid.
pub struct Reference {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    /// `sup_t ‖u(t)‖_𝕎` with Gevrey order `M̄T`.
    pub gevrey_sup: f64,
    /// `sup_t ‖u_t‖` from difference quotients of stored states.
    pub ut_sup: f64,
}

impl Reference {
    pub fn terminal(&self) -> &SpectralField {
        self.states.last().expect("non-empty")
    }

    pub fn initial(&self) -> &SpectralField {
        &self.states[0]
    }
}

/// Forward run of the exact problem. Linear runs are exact per mode; with a
/// source the step is refined tenfold so the reference error stays well
/// below the regularization error.
pub fn reference_solution(
    spec: &ProblemSpec,
    u0: &SpectralField,
    dt: f64,
    stride: usize,
) -> Result<Reference, CliError> {
    let refine = if spec.source.is_zero() { 1 } else { 10 };
    let run = solve_forward(spec, u0, dt / refine as f64, stride * refine)?;
    let alpha = spec.m_bar * spec.horizon;
    let mut gevrey_sup = 0.0f64;
    for u in &run.trajectory {
        match u.gevrey_norm(alpha) {
            Ok(w) => gevrey_sup = gevrey_sup.max(w),
            // the truncated solution is not resolvable in this weight: the
            // bound column becomes infinite rather than failing the run
            Err(qrev_core::Error::GevreyRange { mode, exponent, .. }) => {
                log::warn!("Gevrey norm of the reference overflows at mode {mode} (exponent {exponent:.1}); bound set to inf");
                gevrey_sup = f64::INFINITY;
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mut ut_sup = 0.0f64;
    for k in 1..run.times.len() {
        let d = run.trajectory[k].sub(&run.trajectory[k - 1])?.l2_norm();
        ut_sup = ut_sup.max(d / (run.times[k] - run.times[k - 1]));
    }
    Ok(Reference {
        times: run.times,
        states: run.trajectory,
        gevrey_sup,
        ut_sup,
    })
}

pub fn run_forward(cfg: &mut LoadedConfig, opts: &RunOptions) -> Result<RunSummary, CliError> {
    let started = Instant::now();
    cfg.resolve()?;
    let p = cfg.problem()?.clone();
    let spec = problem_for(&p)?;
    let u0 = initial_for(&p, &spec.basis)?;
    let grid = Grid::of(&cfg.config);
    let run = solve_forward(&spec, &u0, grid.dt, grid.stride)?;
    let dir = out_dir(&cfg.config, opts)?;
    let mut header = FieldHeader::for_basis(&spec.basis);
    header.t = Some(p.horizon);
    fieldfile::write(&dir.join("terminal.qrf"), run.terminal(), &header)?;
    let files = vec!["terminal.qrf".to_string(), "terminal.qrf.hdr".to_string()];
    info!(
        "forward: ‖u(T)‖ = {:e} after {} steps",
        run.terminal().l2_norm(),
        run.steps
    );
    write_meta(&dir, "forward", cfg, &[], &files, started)?;
    Ok(RunSummary {
        out_dir: dir,
        files,
    })
}

/// Everything shared by the runs of one inversion.
pub struct InvertContext {
    pub spec: ProblemSpec,
    pub data: SpectralField,
    pub reference: Reference,
    pub refined: Arc<Basis>,
    pub k: f64,
    pub c1: f64,
    pub kappa: Kappa,
    pub path: SolverPath,
    pub tol: f64,
    pub max_iter: usize,
    pub dt: f64,
    pub stride: usize,
    pub times: Vec<f64>,
    pub r: f64,
}

impl InvertContext {
    pub fn new(cfg: &LoadedConfig, data: Option<SpectralField>) -> Result<Self, CliError> {
        let c = &cfg.config;
        let p = cfg.problem()?;
        let spec = problem_for(p)?;
        let u0 = initial_for(p, &spec.basis)?;
        let grid = Grid::of(c);
        let reference = reference_solution(&spec, &u0, grid.dt, grid.stride)?;
        let data = match data {
            Some(d) => {
                if **d.basis() != *spec.basis {
                    return Err(CliError::Precondition(
                        "data file basis differs from the configured basis".into(),
                    ));
                }
                d
            }
            None => reference.terminal().clone(),
        };
        let refined = spec
            .basis
            .with_quadrature(spec.basis.spec().quadrature_points * c.outputs.oversample)?;
        Ok(InvertContext {
            spec,
            data,
            reference,
            refined,
            k: c.regularization.k,
            c1: c.regularization.c1.expect("resolved"),
            kappa: c.regularization.kappa.policy().expect("resolved"),
            path: c.solver.path,
            tol: c.solver.tol,
            max_iter: c.solver.max_iter,
            dt: grid.dt,
            stride: grid.stride,
            times: c.outputs.times.clone().expect("resolved"),
            r: c.outputs.r,
        })
    }

    fn params(&self, eps: f64) -> Result<FilterParams, CliError> {
        if eps == 0.0 {
            return Err(CliError::Precondition(
                "ε = 0 makes γ = (K/ε)^(1/(C1·T)) infinite; the filter degenerates and there is nothing to regularize"
                    .into(),
            ));
        }
        Ok(FilterParams::from_epsilon(
            eps,
            self.k,
            self.c1,
            self.spec.horizon,
            self.spec.m_bar,
        )?)
    }

    /// Regularized problem for one noise level, with the cut-off applied for
    /// sources that need one.
    pub fn regularized(&self, eps: f64) -> Result<(RegularizedProblem, Option<f64>), CliError> {
        let params = self.params(eps)?;
        let mut spec = self.spec.clone();
        let mut kappa_run = None;
        if spec.source.effective_lipschitz().is_infinite() {
            let s = cutoff_schedule(
                &params,
                &spec.source,
                spec.m_lower,
                spec.horizon,
                self.kappa,
                None,
            )?;
            spec.source = spec.source.with_cutoff(s.ell)?;
            kappa_run = Some(s.kappa);
            info!(
                "ε = {eps:e}: cut-off level Λ = {:e}, ϱ = {:e}",
                s.ell, s.varrho
            );
        }
        Ok((RegularizedProblem::assemble(spec, params)?, kappa_run))
    }

    pub fn solve(
        &self,
        rp: &RegularizedProblem,
        u_f: &SpectralField,
    ) -> Result<BackwardRun, CliError> {
        let run = match self.path {
            SolverPath::Direct => rp.solve_backward(u_f, self.dt, self.stride)?,
            SolverPath::Volterra => {
                let opts = VolterraOptions {
                    tol: self.tol,
                    max_iter: self.max_iter,
                    rho: rp.rho(RhoMode::Existence),
                };
                rp.volterra_iterate(u_f, self.dt, self.stride, opts)?
            }
        };
        if !run.audit.passed() {
            let a = &run.audit;
            return Err(CliError::Numeric(format!(
                "amplification audit failed: {} violations, worst excess {:e} at mode {} t = {}",
                a.violations, a.worst_excess, a.worst_mode, a.worst_time
            )));
        }
        Ok(run)
    }

    /// One noise level and seed: rows for every output time plus the
    /// reconstructed states at those times.
    pub fn invert(&self, eps: f64, seed: u64) -> Result<EpsOutcome, CliError> {
        let (rp, kappa_run) = self.regularized(eps)?;
        let params = *rp.params();
        let noisy = add_noise(&self.data, eps, seed)?;
        let run = self.solve(&rp, &noisy.field)?;
        if run.times.len() != self.reference.times.len() {
            return Err(CliError::Numeric(
                "backward and reference grids differ".into(),
            ));
        }
        let errors = run
            .trajectory
            .iter()
            .zip(&self.reference.states)
            .map(|(u, v)| u.sub(v))
            .collect::<Result<Vec<_>, _>>()?;
        let grad_sq: Vec<f64> = errors.iter().map(|e| e.h1_seminorm().powi(2)).collect();
        let t_eps = tstar_solve(self.c1, params.log_gamma, 1e-13)?;
        let l_f = rp.problem.source.effective_lipschitz();
        let w = self.reference.gevrey_sup;
        let bound_at = |t: f64| -> Result<f64, CliError> {
            Ok(match kappa_run {
                None => error_bound(t, &params, w, l_f),
                Some(_) => {
                    let kappa = self.kappa.resolve(self.c1, t)?;
                    cutoff_error_bound(t, &params, w, kappa, rp.problem.m_lower)
                }
            })
        };

        let mut rows = Vec::with_capacity(self.times.len());
        let mut states = Vec::with_capacity(self.times.len());
        for &t in &self.times {
            let (state, e, from) = if t == 0.0 {
                let u = rp.state_at_time(&run, t_eps)?;
                let e = u.sub(self.reference.initial())?;
                let from = run.times.partition_point(|s| *s < t_eps);
                (u, e, from)
            } else {
                let k = nearest(&run.times, t);
                (run.trajectory[k].clone(), errors[k].clone(), k)
            };
            let bound = match (t == 0.0, kappa_run) {
                (true, None) => tstar_error_bound(t_eps, &params, w, l_f, self.reference.ut_sup),
                (true, Some(_)) => bound_at(t_eps)? + t_eps * self.reference.ut_sup,
                (false, _) => bound_at(t)?,
            };
            let err_h1_tail = trapezoid(&run.times[from..], &grad_sq[from..]);
            let err_lr = lr_error(&e, self.r, &self.refined)?;
            rows.push(ErrorRecord {
                eps,
                gamma: params.gamma,
                t,
                err_l2: e.l2_norm(),
                err_h1_tail,
                err_lr,
                bound,
                t_eps,
            });
            states.push((if t == 0.0 { t_eps } else { t }, state));
        }
        Ok(EpsOutcome {
            rows,
            states,
            iterations: run.iterations,
            audit: run.audit,
        })
    }
}

pub struct EpsOutcome {
    pub rows: Vec<ErrorRecord>,
    /// `(time, state)` per output time; the `t = 0` entry is taken at `t^ε`.
    pub states: Vec<(f64, SpectralField)>,
    pub iterations: Option<usize>,
    pub audit: AmplificationAudit,
}

fn nearest(times: &[f64], t: f64) -> usize {
    times
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
        .map(|(i, _)| i)
        .expect("non-empty grid")
}

/// Least-squares slopes of `log err` against `log ε`, per output time and norm.
pub fn slope_rows(rows: &[ErrorRecord], times: &[f64]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for &t in times {
        for (name, pick) in [("l2", 0usize), ("lr", 1)] {
            let (eps, err): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.t == t)
                .map(|r| (r.eps, if pick == 0 { r.err_l2 } else { r.err_lr }))
                .filter(|(e, v)| *e > 0.0 && *v > 0.0)
                .unzip();
            if let Ok(fit) = fit_rate(&eps, &err) {
                out.push(vec![
                    num(t),
                    name.to_string(),
                    num(fit.slope),
                    num(fit.intercept),
                    num(fit.residual),
                    eps.len().to_string(),
                ]);
            }
        }
    }
    out
}

pub const SLOPES_HEADER: [&str; 6] = ["t", "norm", "slope", "intercept", "residual", "points"];

fn load_data(opts: &RunOptions) -> Result<Option<SpectralField>, CliError> {
    opts.data
        .as_ref()
        .map(|p| fieldfile::read(p).map(|(f, _)| f))
        .transpose()
}

/// Shared body of `invert` and `sweep`.
fn invert_seeds(
    cfg: &mut LoadedConfig,
    opts: &RunOptions,
    seeds: Vec<u64>,
    command: &str,
) -> Result<RunSummary, CliError> {
    let started = Instant::now();
    let ctx = InvertContext::new(cfg, load_data(opts)?)?;
    let eps_list = cfg.config.regularization.eps.clone();
    if eps_list.is_empty() {
        return Err(cfg.error_at("regularization", "`eps` is empty"));
    }
    let dir = out_dir(&cfg.config, opts)?;
    let jobs: Vec<(usize, u64, f64)> = seeds
        .iter()
        .enumerate()
        .flat_map(|(si, &s)| eps_list.iter().map(move |&e| (si, s, e)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(_, seed, eps)| ctx.invert(eps, seed))
        .collect::<Result<Vec<_>, _>>()?;

    let mut files = Vec::new();
    let mut all_rows = Vec::new();
    for (si, &seed) in seeds.iter().enumerate() {
        let mut rows = Vec::new();
        for (ei, &eps) in eps_list.iter().enumerate() {
            let out = &outcomes[si * eps_list.len() + ei];
            if let Some(n) = out.iterations {
                info!("seed {seed}, ε = {eps:e}: {n} Picard iterations");
            }
            rows.extend_from_slice(&out.rows);
            if cfg.config.outputs.write_states {
                for (j, (t, u)) in out.states.iter().enumerate() {
                    let name = format!("state_s{seed}_e{ei}_t{j}.qrf");
                    let mut h = FieldHeader::for_basis(u.basis());
                    h.t = Some(*t);
                    h.eps = Some(eps);
                    h.seed = Some(seed);
                    fieldfile::write(&dir.join(&name), u, &h)?;
                    files.push(name.clone());
                    files.push(name + ".hdr");
                }
            }
        }
        let name = format!("results_seed{seed}.csv");
        table::write_text(&dir.join(&name), &table::render_results(&rows))?;
        files.push(name);
        all_rows.extend(rows);
    }
    let slopes = slope_rows(&all_rows, &ctx.times);
    if !slopes.is_empty() {
        table::write_text(
            &dir.join("slopes.csv"),
            &table::render(&SLOPES_HEADER, &slopes),
        )?;
        files.push("slopes.csv".into());
    } else if eps_list.len() >= 3 {
        warn!("no slope could be fitted");
    }
    files.sort();
    write_meta(&dir, command, cfg, &seeds, &files, started)?;
    Ok(RunSummary {
        out_dir: dir,
        files,
    })
}

pub fn run_invert(cfg: &mut LoadedConfig, opts: &RunOptions) -> Result<RunSummary, CliError> {
    cfg.resolve()?;
    let seed = opts.seed.unwrap_or(cfg.config.outputs.seed);
    cfg.config.outputs.seed = seed;
    invert_seeds(cfg, opts, vec![seed], "invert")
}

pub fn run_sweep(cfg: &mut LoadedConfig, opts: &RunOptions) -> Result<RunSummary, CliError> {
    cfg.resolve()?;
    let o = &cfg.config.outputs;
    let base = o.seeds.clone().unwrap_or_else(|| vec![o.seed]);
    let seeds: Vec<u64> = match opts.seed {
        Some(s) => (0..base.len() as u64).map(|i| s + i).collect(),
        None => base,
    };
    cfg.config.outputs.seeds = Some(seeds.clone());
    invert_seeds(cfg, opts, seeds, "sweep")
}

pub fn run_tstar(cfg: &mut LoadedConfig, opts: &RunOptions) -> Result<RunSummary, CliError> {
    let started = Instant::now();
    cfg.resolve_tstar()?;
    let reg = cfg.config.regularization.clone();
    let c1 = reg.c1.expect("resolved");
    let mut rows = Vec::new();
    let mut entries: Vec<(Option<f64>, f64)> = Vec::new();
    if let Some(p) = &cfg.config.problem {
        for &eps in &reg.eps {
            let params = FilterParams::from_epsilon(eps, reg.k, c1, p.horizon, p.m_bar)?;
            entries.push((Some(eps), params.log_gamma));
        }
    }
    entries.extend(reg.log_gamma.iter().map(|&lg| (None, lg)));
    for (eps, lg) in entries {
        let t = tstar_solve(c1, lg, 1e-13)?;
        rows.push(vec![
            eps.map_or_else(String::new, num),
            num(c1),
            num(lg),
            format!("{t:.12}"),
            num((c1 * lg).powf(-0.5)),
        ]);
    }
    let dir = out_dir(&cfg.config, opts)?;
    let text = table::render(&["eps", "c1", "log_gamma", "t_eps", "upper"], &rows);
    table::write_text(&dir.join("tstar.csv"), &text)?;
    let files = vec!["tstar.csv".to_string()];
    write_meta(&dir, "tstar", cfg, &[], &files, started)?;
    Ok(RunSummary {
        out_dir: dir,
        files,
    })
}

pub fn run_carleman(cfg: &mut LoadedConfig, opts: &RunOptions) -> Result<RunSummary, CliError> {
    let started = Instant::now();
    let block = cfg.carleman()?.clone();
    let basis = Basis::build(BasisSpec::interval(
        DomainKind::IntervalDirichlet,
        block.modes,
    ))?;
    let spatial = GridField::from_fn(&basis, |x| x[0].sin())?.to_spectral();
    let horizon = block.horizon;
    let v = SeparableField {
        spatial,
        temporal: Arc::new(move |t| {
            let s = horizon - t;
            (t * t * s * s, 2.0 * t * s * s - 2.0 * t * t * s)
        }),
    };
    let mut ccfg = CarlemanConfig::new(block.eta, block.m[0], block.k, horizon);
    ccfg.time_intervals = block.time_intervals;
    let sweep = carleman_sweep(&v, block.a, &ccfg, &block.m, block.k_const)?;
    let rows: Vec<Vec<String>> = sweep
        .reports
        .iter()
        .map(|r| {
            vec![
                num(r.m),
                num(r.lhs),
                num(r.weighted_v),
                num(r.weighted_grad),
                num(r.rhs_lower),
                num(r.margin),
                r.holds.to_string(),
                num(r.d_min),
            ]
        })
        .collect();
    let dir = out_dir(&cfg.config, opts)?;
    let header = [
        "m",
        "lhs",
        "weighted_v",
        "weighted_grad",
        "rhs_lower",
        "margin",
        "holds",
        "d_min",
    ];
    table::write_text(&dir.join("carleman.csv"), &table::render(&header, &rows))?;
    let summary = json!({
        "m_star": sweep.m_star,
        "margin": sweep.margin,
        "d_min": sweep.d_min,
        "K": block.k_const,
    });
    table::write_text(
        &dir.join("carleman_summary.json"),
        &(serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"),
    )?;
    let files = vec![
        "carleman.csv".to_string(),
        "carleman_summary.json".to_string(),
    ];
    write_meta(&dir, "carleman", cfg, &[], &files, started)?;
    Ok(RunSummary {
        out_dir: dir,
        files,
    })
}

pub fn run_approx(cfg: &mut LoadedConfig, opts: &RunOptions) -> Result<RunSummary, CliError> {
    let started = Instant::now();
    let a = cfg.approx()?.clone();
    let values = match a.box_radius {
        Some(r) => approximation_numbers_in_box(a.alpha, a.q, a.d, a.n_max, r)?,
        None => approximation_numbers(a.alpha, a.q, a.d, a.n_max)?,
    };
    let rows: Vec<Vec<String>> = values
        .iter()
        .enumerate()
        .map(|(i, v)| vec![(i + 1).to_string(), num(*v)])
        .collect();
    let dir = out_dir(&cfg.config, opts)?;
    table::write_text(
        &dir.join("approx.csv"),
        &table::render(&["n", "a_n"], &rows),
    )?;
    let files = vec!["approx.csv".to_string()];
    write_meta(&dir, "approx-numbers", cfg, &[], &files, started)?;
    Ok(RunSummary {
        out_dir: dir,
        files,
    })
}
