//! One line per acceptance criterion; exits nonzero if any fails.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::{E, PI};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use qrev::experiment::InvertContext;
use qrev::LoadedConfig;
use qrev_core::analysis::{
    carleman_sweep, fit_rate, gn_check, lr_error, tstar_solve, CarlemanConfig, ErrorRecord,
    SeparableField, TimeSeries,
};
use qrev_core::basis::{approximation_numbers, approximation_numbers_in_box};
use qrev_core::forward::add_noise;
use qrev_core::nonlinearity::{cutoff_schedule, sampled_lipschitz};
use qrev_core::solver::{positivity_check, AmplificationAudit, VolterraOptions};
use qrev_core::{
    Basis, BasisSpec, DomainKind, FilterParams, GridField, Kappa, ModalFilter, ProblemSpec,
    RegularizedProblem, RhoMode, SourceSpec, SpectralField,
};

type Outcome = Result<String, String>;

const EPS_LADDER: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Audits gathered from every backward run performed below.
#[derive(Default)]
struct Audits {
    runs: usize,
    checked: usize,
    violations: usize,
    worst_excess: f64,
}

impl Audits {
    fn add(&mut self, a: &AmplificationAudit) {
        if self.runs == 0 || a.worst_excess > self.worst_excess {
            self.worst_excess = a.worst_excess;
        }
        self.runs += 1;
        self.checked += a.checked;
        self.violations += a.violations;
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, started: Instant, detail: String) -> Outcome {
    let took = started.elapsed();
    if took > limit {
        Err(format!("{detail}; took {took:.2?}, limit {limit:?}"))
    } else {
        Ok(detail)
    }
}

fn closed_form(audits: &mut Audits) -> Outcome {
    let started = Instant::now();
    let (a, m_bar, horizon, log_gamma) = (1.0, 2.0, 1.0, 2.0);
    let b = Basis::build(BasisSpec::interval(DomainKind::IntervalDirichlet, 1))
        .map_err(|e| e.to_string())?;
    let spec = ProblemSpec::new(b.clone(), a, m_bar, horizon, SourceSpec::zero())
        .map_err(|e| e.to_string())?;
    let params = FilterParams::from_log_gamma(log_gamma, 1.0 / horizon, horizon, m_bar)
        .map_err(|e| e.to_string())?;
    let rp = RegularizedProblem::assemble(spec, params).map_err(|e| e.to_string())?;
    // λ = -aμ + softplus(M̄Tμ - log γ)/T with μ = 1
    let q = (1.0 + (m_bar * horizon - log_gamma).exp()).ln() / horizon;
    let lambda = -a + q;
    let u_f = SpectralField::from_coeffs(&b, vec![0.75]).unwrap();
    let direct = rp
        .solve_backward(&u_f, 1e-3, 50)
        .map_err(|e| e.to_string())?;
    let opts = VolterraOptions {
        tol: 1e-14,
        max_iter: 50,
        rho: rp.rho(RhoMode::Existence),
    };
    let volterra = rp
        .volterra_iterate(&u_f, 1e-3, 50, opts)
        .map_err(|e| e.to_string())?;
    audits.add(&direct.audit);
    audits.add(&volterra.audit);
    let mut worst = 0.0f64;
    for k in 0..=20 {
        let t = k as f64 / 20.0;
        let want = (lambda * (t - horizon)).exp() * 0.75;
        for run in [&direct, &volterra] {
            let got = run
                .state_at(t)
                .ok_or(format!("no state at t = {t}"))?
                .coeffs()[0];
            worst = worst.max((got - want).abs() / want.abs());
        }
    }
    let detail = format!("max relative error {worst:.2e} over 21 times, both paths");
    if worst >= 1e-10 {
        return Err(detail);
    }
    within(Duration::from_secs(1), started, detail)
}

fn operator_bounds() -> Outcome {
    let started = Instant::now();
    let horizon = 1.0;
    let bases = [
        (
            BasisSpec::interval(DomainKind::IntervalDirichlet, 64),
            "dirichlet",
        ),
        (
            BasisSpec::interval(DomainKind::IntervalNeumann, 64),
            "neumann",
        ),
        (
            BasisSpec::new(DomainKind::Torus, vec![2.0 * PI], 64),
            "torus",
        ),
    ];
    let mut fields = 0usize;
    let mut checks = 0usize;
    let mut violations = Vec::new();
    for (bi, (spec, name)) in bases.into_iter().enumerate() {
        let b = Basis::build(spec).map_err(|e| e.to_string())?;
        let mu_max = b.eigenvalues().fold(0.0, f64::max);
        // keep the Gevrey weight representable on every mode
        let m_bar = 500.0 / (mu_max * horizon);
        let n = if bi == 0 { 68 } else { 66 };
        for i in 0..n {
            let seed = 1000 * bi as u64 + i as u64;
            let noise = add_noise(&SpectralField::zeros(&b), 1.0, seed)
                .map_err(|e| e.to_string())?
                .field;
            let decay = [0.0, 1e-3, 1e-2, 1e-1][i % 4];
            let scale = 10f64.powi((i % 7) as i32 - 3);
            let u = noise.map_with_eigen(|p, mu, c| {
                c * scale * (-decay * mu).exp() * (1.0 + (p % 3) as f64)
            });
            fields += 1;
            for gamma in [2.0f64, 10.0, 100.0, 1e4] {
                let params =
                    FilterParams::from_log_gamma(gamma.ln(), 1.0 / horizon, horizon, m_bar)
                        .map_err(|e| e.to_string())?;
                let f = ModalFilter::build(&b, params);
                let q = f.apply_q(&u).map_err(|e| e.to_string())?.l2_norm();
                let qb = f.q_bound(&u).map_err(|e| e.to_string())?;
                let p = f.apply_p(&u).map_err(|e| e.to_string())?.l2_norm();
                let pb = f.p_bound(&u);
                checks += 2;
                if q > qb * (1.0 + 1e-12) {
                    violations.push(format!("{name} field {i} γ={gamma}: ‖Qu‖ {q:e} > {qb:e}"));
                }
                if p > pb * (1.0 + 1e-12) {
                    violations.push(format!("{name} field {i} γ={gamma}: ‖Pu‖ {p:e} > {pb:e}"));
                }
            }
        }
    }
    let detail = format!(
        "{fields} fields × 4 γ, {checks} checks, {} violations",
        violations.len()
    );
    if !violations.is_empty() {
        return Err(format!("{detail}: {}", violations[0]));
    }
    within(Duration::from_secs(5), started, detail)
}

trait MapWithEigen {
    fn map_with_eigen(&self, f: impl Fn(usize, f64, f64) -> f64) -> SpectralField;
}

impl MapWithEigen for SpectralField {
    fn map_with_eigen(&self, f: impl Fn(usize, f64, f64) -> f64) -> SpectralField {
        let mu: Vec<f64> = self.basis().eigenvalues().collect();
        self.map_modes(|p, c| f(p, mu[p], c))
    }
}

struct HeatSweep {
    rows: Vec<ErrorRecord>,
    elapsed: Duration,
}

fn heat_sweep(audits: &mut Audits) -> Result<HeatSweep, String> {
    let started = Instant::now();
    let mut cfg = LoadedConfig::from_path(&workspace().join("configs/heat.json"))
        .map_err(|e| e.to_string())?;
    cfg.resolve().map_err(|e| e.to_string())?;
    let ctx = InvertContext::new(&cfg, None).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for seed in SEEDS {
        for eps in EPS_LADDER {
            let out = ctx.invert(eps, seed).map_err(|e| e.to_string())?;
            audits.add(&out.audit);
            rows.extend(out.rows);
        }
    }
    Ok(HeatSweep {
        rows,
        elapsed: started.elapsed(),
    })
}

fn rate_and_bound(sweep: &HeatSweep) -> Outcome {
    let half: Vec<&ErrorRecord> = sweep.rows.iter().filter(|r| r.t == 0.5).collect();
    let eps: Vec<f64> = half.iter().map(|r| r.eps).collect();
    let err: Vec<f64> = half.iter().map(|r| r.err_l2).collect();
    let fit = fit_rate(&eps, &err).map_err(|e| e.to_string())?;
    let over: Vec<&ErrorRecord> = sweep
        .rows
        .iter()
        .filter(|r| !(r.err_l2 <= r.bound))
        .collect();
    let worst = sweep
        .rows
        .iter()
        .map(|r| r.err_l2 / r.bound)
        .fold(0.0, f64::max);
    let detail = format!(
        "slope at T/2 {:.3} over {} runs, {} of {} rows above the bound (max err/bound {worst:.3}), sweep {:.2?}",
        fit.slope,
        half.len(),
        over.len(),
        sweep.rows.len(),
        sweep.elapsed
    );
    if fit.slope < 0.4 || !over.is_empty() {
        return Err(detail);
    }
    if sweep.elapsed > Duration::from_secs(120) {
        return Err(format!("{detail}; took {:.2?}", sweep.elapsed));
    }
    Ok(detail)
}

fn tstar_behaviour(sweep: &HeatSweep) -> Outcome {
    let omega = tstar_solve(1.0, 1.0, 1e-13).map_err(|e| e.to_string())?;
    let mut means = Vec::new();
    let mut ratios = Vec::new();
    for eps in EPS_LADDER {
        let at: Vec<&ErrorRecord> = sweep
            .rows
            .iter()
            .filter(|r| r.t == 0.0 && r.eps == eps)
            .collect();
        let mean = at.iter().map(|r| r.err_l2).sum::<f64>() / at.len() as f64;
        // C1 = 1 in the heat configuration
        let log_gamma = at[0].gamma.ln();
        ratios.push(mean / log_gamma.powf(-0.5));
        means.push(mean);
    }
    let monotone = means.windows(2).all(|w| w[1] < w[0]);
    let spread = ratios.iter().cloned().fold(0.0, f64::max)
        / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let detail = format!(
        "t^ε errors {}, ratio spread {spread:.3}, ω = {omega:.10}",
        means
            .iter()
            .map(|m| format!("{m:.3e}"))
            .collect::<Vec<_>>()
            .join(" > ")
    );
    check(
        monotone && spread < 5.0 && (omega - 0.5671432904).abs() < 1e-9,
        detail,
    )
}

fn interpolation(audits: &mut Audits) -> Outcome {
    let (a, m_bar, horizon, r, dt, stride) = (1.0, 1.5, 1.0f64, 4.0, 5e-4, 10);
    let mut c_by_p = Vec::new();
    let mut slope_gaps = Vec::new();
    for p_modes in [32usize, 64, 128] {
        let b = Basis::build(BasisSpec::interval(DomainKind::IntervalDirichlet, p_modes))
            .map_err(|e| e.to_string())?;
        let refined = b
            .with_quadrature(4 * b.spec().quadrature_points)
            .map_err(|e| e.to_string())?;
        let mut c0 = vec![0.0; b.len()];
        c0[0] = (PI / 2.0).sqrt();
        let u0 = SpectralField::from_coeffs(&b, c0).unwrap();
        let u_f = u0.scaled((-horizon).exp());
        let mut c_max = 0.0f64;
        let (mut l2, mut l4, mut eps_all) = (Vec::new(), Vec::new(), Vec::new());
        for eps in EPS_LADDER {
            let spec = ProblemSpec::new(b.clone(), a, m_bar, horizon, SourceSpec::zero())
                .map_err(|e| e.to_string())?;
            let params = FilterParams::from_epsilon(eps, 1.0, 1.0, horizon, m_bar)
                .map_err(|e| e.to_string())?;
            let rp = RegularizedProblem::assemble(spec, params).map_err(|e| e.to_string())?;
            for seed in SEEDS {
                let noisy = add_noise(&u_f, eps, seed).map_err(|e| e.to_string())?.field;
                let run = rp
                    .solve_backward(&noisy, dt, stride)
                    .map_err(|e| e.to_string())?;
                audits.add(&run.audit);
                let from = run.times.partition_point(|t| *t < 0.5 - 1e-12);
                let errors: Vec<SpectralField> = run.times[from..]
                    .iter()
                    .zip(&run.trajectory[from..])
                    .map(|(t, u)| u.sub(&u0.scaled((-t).exp())).unwrap())
                    .collect();
                if seed == SEEDS[0] {
                    let gn = gn_check(
                        TimeSeries {
                            times: &run.times[from..],
                            errors: &errors,
                        },
                        r,
                        4,
                    )
                    .map_err(|e| e.to_string())?;
                    c_max = c_max.max(gn.c_omega_sq.sqrt());
                }
                l2.push(errors[0].l2_norm());
                l4.push(lr_error(&errors[0], r, &refined).map_err(|e| e.to_string())?);
                eps_all.push(eps);
            }
        }
        let s2 = fit_rate(&eps_all, &l2).map_err(|e| e.to_string())?.slope;
        let s4 = fit_rate(&eps_all, &l4).map_err(|e| e.to_string())?.slope;
        c_by_p.push((p_modes, c_max));
        slope_gaps.push((p_modes, s2, s4));
    }
    let hi = c_by_p.iter().map(|c| c.1).fold(0.0, f64::max);
    let lo = c_by_p.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let gap = slope_gaps
        .iter()
        .map(|(_, a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let detail = format!(
        "C_Ω {} (spread {:.3}); L² vs L⁴ slopes {} (max gap {gap:.3})",
        c_by_p
            .iter()
            .map(|(p, c)| format!("P={p}:{c:.3}"))
            .collect::<Vec<_>>()
            .join(" "),
        hi / lo,
        slope_gaps
            .iter()
            .map(|(p, a, b)| format!("P={p}:{a:.3}/{b:.3}"))
            .collect::<Vec<_>>()
            .join(" ")
    );
    check(hi / lo < 2.0 && gap <= 0.1, detail)
}

fn cutoff() -> Outcome {
    let b = 1.0;
    let fisher = SourceSpec::fisher(b).map_err(|e| e.to_string())?;
    let mut worst_ratio = 0.0f64;
    for ell in [0.5, 1.0, 2.0, 10.0] {
        let cut = fisher.with_cutoff(ell).map_err(|e| e.to_string())?;
        for i in 0..=10_000 {
            let u = -ell + 2.0 * ell * i as f64 / 10_000.0;
            if cut.reaction(u).to_bits() != fisher.reaction(u).to_bits() {
                return Err(format!("F_ℓ differs from F at u = {u} inside ℓ = {ell}"));
            }
        }
        let est = sampled_lipschitz(|u| cut.reaction(u), -3.0 * ell, 3.0 * ell, 200_000)
            .map_err(|e| e.to_string())?;
        let cap = b * (1.0 + 2.0 * ell);
        worst_ratio = worst_ratio.max(est.value / cap);
        if est.value > cap * (1.0 + 1e-6) {
            return Err(format!(
                "sampled L = {} exceeds B(1+2ℓ) = {cap} at ℓ = {ell}",
                est.value
            ));
        }
    }
    let params =
        FilterParams::from_log_gamma(E.powi(4), 1.0, 1.0, 1.5).map_err(|e| e.to_string())?;
    let s = cutoff_schedule(&params, &fisher, 1.0, 1.0, Kappa::Fixed(0.5), None)
        .map_err(|e| e.to_string())?;
    let want = (2f64.sqrt() - 1.0) / 2.0;
    let detail = format!(
        "F_ℓ = F inside, sampled L / B(1+2ℓ) ≤ {worst_ratio:.9}, Λ = {:.15} (err {:.1e})",
        s.ell,
        (s.ell - want).abs()
    );
    check((s.ell - want).abs() <= 1e-12, detail)
}

fn positivity(audits: &mut Audits) -> Outcome {
    let (a, m_bar, horizon) = (0.5, 1.5, 1.0);
    let b = Basis::build(BasisSpec::interval(DomainKind::IntervalNeumann, 16))
        .map_err(|e| e.to_string())?;
    let u_f = GridField::from_fn(&b, |x| 1.0 + 0.5 * x[0].cos())
        .map_err(|e| e.to_string())?
        .to_spectral();
    let spec = ProblemSpec::new(b.clone(), a, m_bar, horizon, SourceSpec::zero())
        .map_err(|e| e.to_string())?;
    let params =
        FilterParams::from_epsilon(1e-3, 1.0, 1.0, horizon, m_bar).map_err(|e| e.to_string())?;
    let rp = RegularizedProblem::assemble(spec, params).map_err(|e| e.to_string())?;
    let run = rp
        .solve_backward(&u_f, 1e-3, 10)
        .map_err(|e| e.to_string())?;
    audits.add(&run.audit);
    let rep = positivity_check(&rp, &run, &u_f);
    if let Some(why) = &rep.skipped {
        return Err(format!("check skipped: {why}"));
    }
    let detail = format!(
        "a = {a}: scaled min {:.6e}, max {:.9} (ρ = {:.3})",
        rep.min, rep.max, rep.rho
    );
    check(rep.min >= -1e-6 && rep.max <= 1.5 + 1e-6, detail)
}

fn carleman() -> Outcome {
    let horizon = 0.1;
    let b = Basis::build(BasisSpec::interval(DomainKind::IntervalDirichlet, 8))
        .map_err(|e| e.to_string())?;
    let mut c = vec![0.0; b.len()];
    c[0] = (PI / 2.0).sqrt();
    let v = SeparableField {
        spatial: SpectralField::from_coeffs(&b, c).unwrap(),
        temporal: Arc::new(move |t| {
            let s = horizon - t;
            (t * t * s * s, 2.0 * t * s * s - 2.0 * t * t * s)
        }),
    };
    let ms: Vec<f64> = (0..=16).map(|i| 0.25 * 2f64.powf(i as f64 / 2.0)).collect();
    let cfg = CarlemanConfig::new(0.05, ms[0], 1.0, horizon);
    let sweep = carleman_sweep(&v, 1.0, &cfg, &ms, 10.0).map_err(|e| e.to_string())?;
    let Some(m_star) = sweep.m_star else {
        return Err("no m* found in the tested range".into());
    };
    let window: Vec<_> = sweep
        .reports
        .iter()
        .filter(|r| r.m >= m_star && r.m <= 4.0 * m_star)
        .collect();
    let holds = window.iter().all(|r| r.holds);
    let detail = format!(
        "m* = {m_star}, holds on {} tested m in [m*, 4m*], min margin {:.3e}, D_min {:.3e}",
        window.len(),
        sweep.margin,
        sweep.d_min
    );
    check(holds && window.len() >= 2, detail)
}

fn approximation() -> Outcome {
    let a = approximation_numbers(1.0, 2.0, 1, 100).map_err(|e| e.to_string())?;
    let wide = approximation_numbers_in_box(1.0, 2.0, 1, 100, 400).map_err(|e| e.to_string())?;
    let e1 = (-1.0f64).exp();
    let lead = a[0] == 1.0 && (a[1] - e1).abs() < 1e-15 && (a[2] - e1).abs() < 1e-15;
    let monotone = a.windows(2).all(|w| w[1] <= w[0]);
    let stable = a == wide;
    let detail = format!(
        "a_1 = {}, a_2 = {:.15}, a_3 = {:.15}, a_100 = {:.3e}, nonincreasing {monotone}, box-stable {stable}",
        a[0], a[1], a[2], a[99]
    );
    check(lead && monotone && stable && a.len() == 100, detail)
}

fn determinism() -> Outcome {
    let tmp = std::env::temp_dir().join(format!("qrev-acceptance-{}", std::process::id()));
    let config = workspace().join("configs/heat.json");
    let run = |name: &str, extra: &[&str]| -> Result<PathBuf, String> {
        let out = tmp.join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_qrev"))
            .arg("sweep")
            .args(extra)
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .env_remove("QUASIREV_OUT")
            .output()
            .map_err(|e| e.to_string())?;
        if !o.status.success() {
            return Err(String::from_utf8_lossy(&o.stderr).into_owned());
        }
        Ok(out)
    };
    let a = run("a", &["--threads", "1"])?;
    let b = run("b", &[])?;
    let mut names: Vec<_> = fs::read_dir(&a)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let mut compared = 0;
    for n in &names {
        if n == "timing.json" {
            continue;
        }
        let x = fs::read(a.join(n)).map_err(|e| e.to_string())?;
        let y = fs::read(b.join(n)).map_err(|e| format!("{n:?}: {e}"))?;
        if x != y {
            let _ = fs::remove_dir_all(&tmp);
            return Err(format!("{n:?} differs between reruns"));
        }
        compared += 1;
    }
    let _ = fs::remove_dir_all(&tmp);
    check(
        compared > 10,
        format!("{compared} files byte-identical across two sweeps (1 thread vs default)"),
    )
}

fn main() -> ExitCode {
    let mut audits = Audits::default();
    let mut results: Vec<(usize, &str, Outcome, Duration)> = Vec::new();
    let mut timed = |n: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let started = Instant::now();
        let out = f();
        results.push((n, name, out, started.elapsed()));
    };

    timed(1, "linear closed form", &mut || closed_form(&mut audits));
    timed(2, "operator bounds", &mut operator_bounds);
    let sweep = heat_sweep(&mut audits);
    match &sweep {
        Ok(s) => {
            timed(4, "error rate and bound", &mut || rate_and_bound(s));
            timed(5, "t^ε rule", &mut || tstar_behaviour(s));
        }
        Err(e) => {
            timed(4, "error rate and bound", &mut || Err(e.clone()));
            timed(5, "t^ε rule", &mut || Err(e.clone()));
        }
    }
    timed(6, "interpolation inequality", &mut || {
        interpolation(&mut audits)
    });
    timed(7, "cut-off machinery", &mut cutoff);
    timed(8, "positivity", &mut || positivity(&mut audits));
    timed(3, "amplification audit", &mut || {
        check(
            audits.violations == 0 && audits.runs > 0,
            format!(
                "{} runs, {} mode checks, {} violations, worst log-excess {:.3e}",
                audits.runs, audits.checked, audits.violations, audits.worst_excess
            ),
        )
    });
    timed(9, "Carleman inequality", &mut carleman);
    timed(10, "approximation numbers", &mut approximation);
    timed(11, "determinism", &mut determinism);

    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (n, name, out, took) in &results {
        let (tag, text) = match out {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n:>2} {tag} {name}: {text} [{took:.2?}]");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
