//! One runner per experiment kind.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use cnls_core::diagnostics::{
    morawetz_interaction_direct, morawetz_interaction_fft, scattering_pullback, scattering_residual,
    DiagnosticRecord, Recorder,
};
use cnls_core::integrator::{evolve, validity_window, StepConfig, ValidityWindow};
use cnls_core::model::{bootstrap_check, fit_offset, xi, ModelParams, SystemState};
use cnls_core::spectral::{lp_norm, ComplexField, Grid};
use cnls_core::Error as CoreError;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::checkpoint::{save_checkpoint, Checkpoint};
use crate::config::{DataSpec, ExperimentConfig, Kind};
use crate::data::{free_gaussian, initial_state, plane_wave_solution};
use crate::error::{HarnessError, Result};
use crate::output::write_csv;
use crate::verdict::{Status, Verdict};

/// Verdict plus the files written for it.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub verdict: Verdict,
    pub artifacts: Vec<PathBuf>,
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    out_dir: &'a Path,
    grid: Arc<Grid>,
    artifacts: Vec<PathBuf>,
}

impl Context<'_> {
    fn path(&self, suffix: &str) -> PathBuf {
        self.out_dir.join(format!("{}{suffix}", self.config.id))
    }

    fn csv(&mut self, suffix: &str, records: &[DiagnosticRecord]) -> Result<()> {
        let path = self.path(&format!("{suffix}.csv"));
        write_csv(records, self.config.model.m(), &path)?;
        self.artifacts.push(path);
        Ok(())
    }

    fn checkpoint(&mut self, state: &SystemState) -> Result<()> {
        let path = self.path(".ckpt");
        save_checkpoint(state, &self.config.model, &path)?;
        self.artifacts.push(path);
        Ok(())
    }

    fn recorder(&self) -> Recorder {
        recorder_for(self.config)
    }

    fn initial(&self) -> Result<SystemState> {
        Ok(initial_state(&self.config.data, &self.grid, self.config.model.m(), self.config.seed)?)
    }
}

fn recorder_for(config: &ExperimentConfig) -> Recorder {
    let mut r = Recorder::new(config.model.clone());
    if config.track_scattering {
        r = r.with_scattering();
    }
    if let Some(edge) = config.gn_edge {
        r = r.with_gn_ratio(edge);
    }
    r
}

/// Evolves through successive breakpoints (the last is the final time),
/// recording every `record_every` steps and at every breakpoint. `on_break`
/// sees the state at each breakpoint.
fn simulate(
    state: &SystemState,
    params: &ModelParams,
    dt: f64,
    record_every: usize,
    breakpoints: &[f64],
    free_flow: bool,
    recorder: &mut Recorder,
    mut on_break: impl FnMut(&SystemState) -> Result<()>,
) -> Result<(SystemState, Vec<DiagnosticRecord>)> {
    let mut current = state.clone();
    let mut records = Vec::new();
    for (i, &t) in breakpoints.iter().enumerate() {
        let mut step = StepConfig::new(dt, t, record_every);
        step.free_flow = free_flow;
        let mut first = i > 0;
        let (next, traj) = evolve(&current, params, &step, |s| {
            if first {
                first = false;
                return Ok(None);
            }
            recorder.observe(s).map(Some)
        })?;
        records.extend(traj.samples.into_iter().filter_map(|(_, r)| r));
        on_break(&next)?;
        current = next;
    }
    Ok((current, records))
}

fn window_json(w: &ValidityWindow, fraction: f64) -> Value {
    json!({
        "t_valid": w.t_valid,
        "support_radius": w.support_radius,
        "k_sig": w.k_sig,
        "center": w.center,
        "fraction": fraction,
        "warning": w.warning,
    })
}

/// Final time for window-driven kinds, or `None` when the data is not
/// localized and no explicit `t_end` was given.
fn horizon(config: &ExperimentConfig, window: &ValidityWindow, verdict: &mut Verdict) -> Option<f64> {
    verdict.measure("window", window_json(window, config.window_fraction));
    if let Some(w) = &window.warning {
        verdict.notes.push(w.clone());
    }
    let t_end = match config.t_end {
        Some(t) => t,
        None if window.t_valid > 0.0 && window.t_valid.is_finite() => config.window_factor * window.t_valid,
        None => return None,
    };
    if t_end > window.t_valid {
        verdict.notes.push(format!(
            "t_end = {t_end} lies beyond the validity window T_valid = {}",
            window.t_valid
        ));
    }
    verdict.param("t_end", t_end);
    Some(t_end)
}

fn max_relative_drift(records: &[DiagnosticRecord], f: impl Fn(&DiagnosticRecord) -> f64) -> f64 {
    let f0 = f(&records[0]);
    let scale = if f0 != 0.0 { f0.abs() } else { 1.0 };
    records.iter().map(|r| (f(r) - f0).abs() / scale).fold(0.0, f64::max)
}

fn l2_distance(a: &SystemState, b: &SystemState) -> Result<f64> {
    let mut total = 0.0;
    for (x, y) in a.components().iter().zip(b.components()) {
        total += lp_norm(&x.to_physical().sub(&y.to_physical())?, 2.0)?.powi(2);
    }
    Ok(total.sqrt())
}

fn parameters(config: &ExperimentConfig, verdict: &mut Verdict) {
    let model = &config.model;
    verdict.param("dim", model.dim());
    verdict.param("components", model.m());
    verdict.param("p", model.p_exact().to_string());
    verdict.param("coupling", model.coupling().entries().to_vec());
    verdict.param("points", config.points.clone());
    verdict.param("box", config.box_lengths.clone());
    verdict.param("dt", config.dt);
    if let Some(t) = config.t_end {
        verdict.param("t_end", t);
    }
    verdict.param("record_every", config.record_every);
    verdict.param("seed", config.seed);
    verdict.param("data.family", config.data.family());
    if config.kind.uses_window_horizon() {
        verdict.param("window.fraction", config.window_fraction);
        verdict.param("window.factor", config.window_factor);
    }
    if let Some(edge) = config.gn_edge {
        verdict.param("diagnostics.gn_edge", edge);
    }
    match config.kind {
        Kind::Scattering => verdict.param("scattering.levels", config.scattering_levels),
        Kind::CriticalSmallData => {
            verdict.param("critical.xi_targets", config.xi_targets.clone());
            verdict.param("critical.report_targets", config.report_targets.clone());
            verdict.param("bootstrap.b", config.bootstrap_b);
        }
        Kind::OracleMorawetz => verdict.param("oracle.samples", config.oracle_samples),
        _ => {}
    }
}

/// Runs one experiment, writing the CSV series, a final checkpoint (for
/// evolution kinds) and `<id>.verdict.json` into `out_dir`.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<Outcome> {
    std::fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let grid = Grid::new(&config.points, &config.box_lengths)?;
    let mut ctx = Context {
        config,
        out_dir,
        grid,
        artifacts: Vec::new(),
    };
    let mut verdict = Verdict::new(&config.id, config.kind.name());
    verdict.thresholds = config.thresholds.clone();
    parameters(config, &mut verdict);

    let result = match config.kind {
        Kind::Conservation => conservation(&mut ctx, &mut verdict),
        Kind::Convergence => convergence(&mut ctx, &mut verdict),
        Kind::FreeCheck => free_check(&mut ctx, &mut verdict),
        Kind::Decay => decay(&mut ctx, &mut verdict),
        Kind::Morawetz => morawetz(&mut ctx, &mut verdict),
        Kind::Scattering => scattering(&mut ctx, &mut verdict),
        Kind::CriticalSmallData => critical_smalldata(&mut ctx, &mut verdict),
        Kind::OracleMorawetz => oracle_morawetz(&mut ctx, &mut verdict),
    };
    match result {
        Ok(status) => verdict.status = status,
        Err(HarnessError::Core(CoreError::Divergence { time })) => {
            verdict.status = Status::Fail;
            verdict.measure("blow_up_time", time);
            verdict.notes.push(format!("non-finite values at t = {time}"));
        }
        Err(e) => return Err(e),
    }
    let path = ctx.path(".verdict.json");
    verdict.write(&path)?;
    ctx.artifacts.push(path);
    Ok(Outcome {
        verdict,
        artifacts: ctx.artifacts,
    })
}

fn conservation(ctx: &mut Context, verdict: &mut Verdict) -> Result<Status> {
    let config = ctx.config;
    let t_end = config.t_end.expect("validated");
    let state = ctx.initial()?;
    let mut rec_a = ctx.recorder();
    let (fin, a) = simulate(&state, &config.model, config.dt, config.record_every, &[t_end], false, &mut rec_a, |_| Ok(()))?;
    let mut rec_b = ctx.recorder();
    let (_, b) = simulate(&state, &config.model, config.dt / 2.0, 2 * config.record_every, &[t_end], false, &mut rec_b, |_| Ok(()))?;
    ctx.csv("", &a)?;
    ctx.csv("-half_dt", &b)?;
    ctx.checkpoint(&fin)?;

    let per_component: Vec<f64> = (0..config.model.m())
        .map(|j| max_relative_drift(&a, |r| r.masses[j]))
        .collect();
    let mass_drift = per_component.iter().cloned().fold(0.0, f64::max);
    let drift_a = max_relative_drift(&a, |r| r.energy);
    let drift_b = max_relative_drift(&b, |r| r.energy);
    let ratio = drift_a / drift_b;
    verdict.measure("mass_drift", mass_drift);
    verdict.measure("mass_drift_per_component", per_component);
    verdict.measure("energy_drift_dt", drift_a);
    verdict.measure("energy_drift_half_dt", drift_b);
    verdict.measure("energy_drift_ratio", ratio);
    verdict.measure("steps", StepConfig::new(config.dt, t_end, 1).step_count(0.0));

    let th = &config.thresholds;
    let pass = mass_drift < th["mass_drift"]
        && drift_a < th["energy_drift"]
        && ratio >= th["ratio_min"]
        && ratio <= th["ratio_max"];
    Ok(Status::from_pass(pass))
}

fn convergence(ctx: &mut Context, verdict: &mut Verdict) -> Result<Status> {
    let config = ctx.config;
    let t_end = config.t_end.expect("validated");
    let state = ctx.initial()?;
    if let DataSpec::PlaneWave { modes, amplitudes } = &config.data {
        let mut recorder = ctx.recorder();
        let mut worst: f64 = 0.0;
        let grid = ctx.grid.clone();
        let step = StepConfig::new(config.dt, t_end, config.record_every);
        let (fin, traj) = evolve(&state, &config.model, &step, |s| {
            let exact = plane_wave_solution(&grid, modes, amplitudes, &config.model, s.time);
            for (u, e) in s.components().iter().zip(&exact) {
                worst = worst.max(u.max_abs_diff(e)?);
            }
            recorder.observe(s)
        })?;
        let records: Vec<_> = traj.samples.into_iter().map(|(_, r)| r).collect();
        ctx.csv("", &records)?;
        ctx.checkpoint(&fin)?;
        verdict.measure("plane_wave_error", worst);
        verdict.measure("steps", step.step_count(0.0));
        return Ok(Status::from_pass(worst < config.thresholds["plane_wave_error"]));
    }

    let mut finals = Vec::new();
    for (k, suffix) in ["", "-half_dt", "-quarter_dt"].iter().enumerate() {
        let scale = (1usize << k) as f64;
        let mut recorder = ctx.recorder();
        let (fin, records) = simulate(
            &state,
            &config.model,
            config.dt / scale,
            config.record_every << k,
            &[t_end],
            false,
            &mut recorder,
            |_| Ok(()),
        )?;
        ctx.csv(suffix, &records)?;
        finals.push(fin);
    }
    ctx.checkpoint(&finals[2])?;
    let e1 = l2_distance(&finals[0], &finals[1])?;
    let e2 = l2_distance(&finals[1], &finals[2])?;
    let order = (e1 / e2).log2();
    verdict.measure("difference_dt_half_dt", e1);
    verdict.measure("difference_half_quarter_dt", e2);
    verdict.measure("observed_order", order);
    let th = &config.thresholds;
    Ok(Status::from_pass(order >= th["order_min"] && order <= th["order_max"]))
}

fn free_check(ctx: &mut Context, verdict: &mut Verdict) -> Result<Status> {
    let config = ctx.config;
    let DataSpec::Gaussian(bumps) = &config.data else {
        unreachable!("validated")
    };
    let state = ctx.initial()?;
    let window = validity_window(&state, config.window_fraction)?;
    let Some(t_end) = horizon(config, &window, verdict) else {
        return Ok(Status::Warn);
    };
    let mut recorder = ctx.recorder();
    let grid = ctx.grid.clone();
    let m0: Vec<f64> = state.components().iter().map(|u| lp_norm(u, 2.0).map(|n| n * n)).collect::<std::result::Result<_, _>>()?;
    let mut max_error: f64 = 0.0;
    let mut isometry: f64 = 0.0;
    let step = StepConfig::new(config.dt, t_end, config.record_every).free();
    let (fin, traj) = evolve(&state, &config.model, &step, |s| {
        for ((u, b), m) in s.components().iter().zip(bumps).zip(&m0) {
            let exact = free_gaussian(&grid, b, s.time);
            max_error = max_error.max(u.max_abs_diff(&exact)?);
            let mass = lp_norm(u, 2.0)?.powi(2);
            isometry = isometry.max((mass - m).abs() / m);
        }
        recorder.observe(s)
    })?;
    let records: Vec<_> = traj.samples.into_iter().map(|(_, r)| r).collect();
    ctx.csv("", &records)?;
    ctx.checkpoint(&fin)?;
    verdict.measure("max_error", max_error);
    verdict.measure("isometry_drift", isometry);
    let th = &config.thresholds;
    let pass = max_error < th["max_error"] && isometry < th["isometry"];
    Ok(Status::from_pass(pass).warn_if(t_end > window.t_valid))
}

fn decay(ctx: &mut Context, verdict: &mut Verdict) -> Result<Status> {
    let config = ctx.config;
    let state = ctx.initial()?;
    let window = validity_window(&state, config.window_fraction)?;
    let Some(t_end) = horizon(config, &window, verdict) else {
        return Ok(Status::Warn);
    };
    let mut recorder = ctx.recorder();
    let (fin, records) = simulate(&state, &config.model, config.dt, config.record_every, &[t_end], false, &mut recorder, |_| Ok(()))?;
    ctx.csv("", &records)?;
    ctx.checkpoint(&fin)?;
    let first = records.first().unwrap().lr_norm;
    let last = records.last().unwrap().lr_norm;
    let ratio = last / first;
    verdict.measure("lr_norm_initial", first);
    verdict.measure("lr_norm_final", last);
    verdict.measure("lr_norm_ratio", ratio);
    let th = &config.thresholds;
    let long_enough = window.t_valid >= th["min_window"];
    if !long_enough {
        verdict.notes.push(format!(
            "validity window {} is shorter than threshold.min_window = {}",
            window.t_valid, th["min_window"]
        ));
    }
    let pass = long_enough && ratio <= th["decay_factor"];
    Ok(Status::from_pass(pass).warn_if(t_end > window.t_valid))
}

fn morawetz(ctx: &mut Context, verdict: &mut Verdict) -> Result<Status> {
    let config = ctx.config;
    let state = ctx.initial()?;
    let window = validity_window(&state, config.window_fraction)?;
    let Some(t_end) = horizon(config, &window, verdict) else {
        return Ok(Status::Warn);
    };
    let mut recorder = ctx.recorder();
    let mid = 0.5 * t_end;
    let (fin, records) = simulate(&state, &config.model, config.dt, config.record_every, &[mid, t_end], false, &mut recorder, |_| Ok(()))?;
    ctx.csv("", &records)?;
    ctx.checkpoint(&fin)?;
    let at_mid = records
        .iter()
        .find(|r| r.time == mid)
        .expect("breakpoints are recorded")
        .morawetz_cum;
    let at_end = records.last().unwrap().morawetz_cum;
    let first = at_mid;
    let second = at_end - at_mid;
    verdict.measure("increment_first_half", first);
    verdict.measure("increment_second_half", second);
    verdict.measure("increment_ratio", second / first);
    let pass = second < config.thresholds["increment_ratio"] * first;
    Ok(Status::from_pass(pass).warn_if(t_end > window.t_valid))
}

fn scattering(ctx: &mut Context, verdict: &mut Verdict) -> Result<Status> {
    let config = ctx.config;
    let state = ctx.initial()?;
    let window = validity_window(&state, config.window_fraction)?;
    let Some(t_end) = horizon(config, &window, verdict) else {
        return Ok(Status::Warn);
    };
    let levels = config.scattering_levels;
    let t0 = t_end / (1u64 << levels) as f64;
    let breakpoints: Vec<f64> = (0..=levels).map(|k| t0 * (1u64 << k) as f64).collect();
    let mut pullbacks = Vec::new();
    let mut recorder = ctx.recorder();
    let (fin, records) = simulate(&state, &config.model, config.dt, config.record_every, &breakpoints, false, &mut recorder, |s| {
        pullbacks.push(scattering_pullback(s));
        Ok(())
    })?;
    ctx.csv("", &records)?;
    ctx.checkpoint(&fin)?;

    let residuals: Vec<f64> = pullbacks
        .windows(2)
        .map(|w| scattering_residual(&w[1], &w[0]))
        .collect::<cnls_core::Result<_>>()?;
    let psi_plus = pullbacks.last().unwrap();
    let distances: Vec<f64> = pullbacks[..pullbacks.len() - 1]
        .iter()
        .map(|v| scattering_residual(v, psi_plus))
        .collect::<cnls_core::Result<_>>()?;
    let decreasing = residuals.windows(2).all(|w| w[1] < w[0]);
    let n = distances.len();
    let tail_decreasing = n >= 2 && distances[n - 1] < distances[n - 2];
    verdict.measure("dyadic_times", breakpoints.clone());
    verdict.measure("pullback_residuals", residuals);
    verdict.measure("distance_to_final_profile", distances);
    verdict.measure("residuals_decreasing", decreasing);
    verdict.measure("final_distance_decreasing", tail_decreasing);
    Ok(Status::from_pass(decreasing && tail_decreasing).warn_if(t_end > window.t_valid))
}

fn critical_smalldata(ctx: &mut Context, verdict: &mut Verdict) -> Result<Status> {
    let config = ctx.config;
    let dim = config.model.dim();
    let theta = config
        .bootstrap_theta
        .unwrap_or_else(|| dim as f64 / (dim as f64 - 2.0));
    verdict.param("bootstrap.theta", theta);
    let b = config.bootstrap_b;
    let base = ctx.initial()?;
    let xi0 = xi(&base);
    if xi0 == 0.0 {
        return Err(CoreError::InvalidParams("initial data has zero gradient energy; cannot scale to a target".into()).into());
    }
    let window = validity_window(&base, config.window_fraction)?;
    let Some(t_end) = horizon(config, &window, verdict) else {
        return Ok(Status::Warn);
    };

    let mut pass = true;
    let mut runs = Vec::new();
    let targets: Vec<(f64, bool)> = config
        .xi_targets
        .iter()
        .map(|&x| (x, true))
        .chain(config.report_targets.iter().map(|&x| (x, false)))
        .collect();
    for (k, &(target, checked)) in targets.iter().enumerate() {
        let factor = Complex64::new((target / xi0).sqrt(), 0.0);
        let comps: Vec<ComplexField> = base.components().iter().map(|u| u.scale(factor)).collect();
        let state = SystemState::new(0.0, comps)?;
        let initial_xi = xi(&state);
        let mut recorder = ctx.recorder();
        let (fin, records) = simulate(&state, &config.model, config.dt, config.record_every, &[t_end], false, &mut recorder, |_| Ok(()))?;
        ctx.csv(&format!("-xi{}", k + 1), &records)?;
        if k == 0 {
            ctx.checkpoint(&fin)?;
        }
        let samples: Vec<(f64, f64)> = records.iter().map(|r| (r.time, r.xi)).collect();
        let sup = samples.iter().map(|s| s.1).fold(0.0, f64::max);
        let a = fit_offset(b, theta, &samples);
        let boot = bootstrap_check(a, b, theta, &samples)?;
        let growth_ok = sup <= config.thresholds["xi_growth"] * initial_xi;
        if checked {
            pass &= growth_ok && boot.passed();
        }
        runs.push(json!({
            "target": target,
            "checked": checked,
            "xi_initial": initial_xi,
            "xi_sup": sup,
            "xi_sup_ratio": sup / initial_xi,
            "growth_ok": growth_ok,
            "bootstrap": {
                "a": boot.a,
                "b": boot.b,
                "theta": boot.theta,
                "smallness_threshold": boot.smallness_threshold,
                "initial_threshold": boot.initial_threshold,
                "conclusion_bound": boot.conclusion_bound,
                "smallness": boot.smallness,
                "initial_condition": boot.initial_condition,
                "self_bound": boot.self_bound,
                "conclusion_holds": boot.conclusion_holds,
                "passed": boot.passed(),
            },
        }));
    }
    verdict.measure("runs", runs);
    Ok(Status::from_pass(pass).warn_if(t_end > window.t_valid))
}

fn oracle_morawetz(ctx: &mut Context, verdict: &mut Verdict) -> Result<Status> {
    let config = ctx.config;
    let mut worst: f64 = 0.0;
    let mut values = Vec::new();
    for s in 0..config.oracle_samples {
        let state = initial_state(&config.data, &ctx.grid, config.model.m(), config.seed.wrapping_add(s as u64))?;
        let direct = morawetz_interaction_direct(&state)?.total();
        let fft = morawetz_interaction_fft(&state).total();
        let rel = (direct - fft).abs() / direct.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        values.push(json!({ "direct": direct, "fft": fft, "relative_difference": rel }));
    }
    verdict.measure("samples", values);
    verdict.measure("max_relative_difference", worst);
    Ok(Status::from_pass(worst < config.thresholds["relative"]))
}

/// Continues a checkpointed run to the configured `t_end`, writing
/// `<id>-resumed.csv`, `<id>-resumed.ckpt` and a verdict.
pub fn resume_experiment(config: &ExperimentConfig, checkpoint: &Checkpoint, out_dir: &Path) -> Result<Outcome> {
    std::fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let state = &checkpoint.state;
    let grid = state.grid();
    let mismatch = |what: &str| HarnessError::Core(CoreError::Shape(format!("checkpoint {what} differs from the configuration")));
    if grid.points() != config.points.as_slice() || grid.lengths() != config.box_lengths.as_slice() {
        return Err(mismatch("grid"));
    }
    if checkpoint.dim != config.model.dim() || checkpoint.p != config.model.p() || &checkpoint.coupling != config.model.coupling() {
        return Err(mismatch("model"));
    }
    let params = checkpoint.params(Some(config.model.p_exact()))?;
    let t_end = config.t_end.ok_or_else(|| CoreError::InvalidParams("resume needs t_end in the configuration".into()))?;
    if t_end <= state.time {
        return Err(CoreError::InvalidParams(format!("t_end = {t_end} is not after the checkpoint time {}", state.time)).into());
    }

    let mut verdict = Verdict::new(&config.id, "resume");
    parameters(config, &mut verdict);
    verdict.param("t_start", state.time);
    verdict.param("t_end", t_end);
    let mut recorder = recorder_for(config);
    let mut artifacts = Vec::new();
    match simulate(state, &params, config.dt, config.record_every, &[t_end], false, &mut recorder, |_| Ok(())) {
        Ok((fin, records)) => {
            let csv = out_dir.join(format!("{}-resumed.csv", config.id));
            write_csv(&records, params.m(), &csv)?;
            let ckpt = out_dir.join(format!("{}-resumed.ckpt", config.id));
            save_checkpoint(&fin, &params, &ckpt)?;
            artifacts.extend([csv, ckpt]);
            verdict.measure("final_time", fin.time);
            verdict.status = Status::Pass;
        }
        Err(HarnessError::Core(CoreError::Divergence { time })) => {
            verdict.measure("blow_up_time", time);
            verdict.status = Status::Fail;
        }
        Err(e) => return Err(e),
    }
    let path = out_dir.join(format!("{}-resumed.verdict.json", config.id));
    verdict.write(&path)?;
    artifacts.push(path);
    Ok(Outcome { verdict, artifacts })
}
