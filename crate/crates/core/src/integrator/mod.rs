//! Strang splitting with exact substeps.
//!
//! Sign convention: `i ∂_t u_j + Δu_j = F_j = Θ_j u_j`. The linear flow
//! multiplies each Fourier coefficient by `e^{-i|k|²τ}`; the nonlinear flow
//! preserves every `|u_j|` pointwise (hence `Θ_j`), so it is the exact phase
//! rotation `u_j ↦ e^{-iτΘ_j} u_j`.

mod window;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{phase_rates, ModelParams, SystemState};
use crate::spectral::{ComplexField, Grid};

pub use window::{validity_window, ValidityWindow, DEFAULT_ENERGY_FRACTION};

/// Time-stepping controls for [`evolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepConfig {
    /// Step size. Its sign must match the direction from the initial time to `t_end`.
    pub dt: f64,
    pub t_end: f64,
    /// Steps between observer calls.
    pub record_every: usize,
    /// Disables the nonlinear substep (free Schrödinger reference runs).
    pub free_flow: bool,
}

impl StepConfig {
    pub fn new(dt: f64, t_end: f64, record_every: usize) -> Self {
        Self {
            dt,
            t_end,
            record_every,
            free_flow: false,
        }
    }

    pub fn free(mut self) -> Self {
        self.free_flow = true;
        self
    }

    pub fn validate(&self, t0: f64) -> Result<()> {
        if !(self.dt.is_finite() && self.dt != 0.0) {
            return Err(Error::InvalidParams(format!("dt must be nonzero and finite, got {}", self.dt)));
        }
        if !self.t_end.is_finite() || self.t_end == t0 {
            return Err(Error::InvalidParams(format!(
                "t_end = {} must differ from the initial time {t0}",
                self.t_end
            )));
        }
        if (self.t_end - t0).signum() != self.dt.signum() {
            return Err(Error::InvalidParams(format!(
                "dt = {} points away from t_end = {} (initial time {t0})",
                self.dt, self.t_end
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParams("record_every must be positive".into()));
        }
        Ok(())
    }

    /// Number of steps; the last one is shortened to land on `t_end`.
    pub fn step_count(&self, t0: f64) -> usize {
        let ratio = (self.t_end - t0) / self.dt;
        let n = (ratio - 1e-9 * ratio.abs().max(1.0)).ceil();
        (n as usize).max(1)
    }
}

/// Observer output sampled along a run, strictly increasing in time
/// (or strictly decreasing for backward runs).
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub samples: Vec<(f64, T)>,
}

impl<T> Trajectory<T> {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|(t, _)| *t)
    }

    pub fn values(&self) -> impl Iterator<Item = &T> {
        self.samples.iter().map(|(_, v)| v)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&(f64, T)> {
        self.samples.last()
    }
}

/// Small cache of `e^{-i|k|²τ}` tables keyed by `τ`.
#[derive(Default)]
struct PhaseCache {
    tables: Vec<(u64, Vec<Complex64>)>,
}

impl PhaseCache {
    const CAPACITY: usize = 4;

    fn table(&mut self, grid: &Grid, tau: f64) -> &[Complex64] {
        let key = tau.to_bits();
        if let Some(i) = self.tables.iter().position(|(k, _)| *k == key) {
            return &self.tables[i].1;
        }
        if self.tables.len() == Self::CAPACITY {
            self.tables.remove(0);
        }
        let table = grid
            .k_squared()
            .iter()
            .map(|&k2| Complex64::from_polar(1.0, -k2 * tau))
            .collect();
        self.tables.push((key, table));
        &self.tables.last().unwrap().1
    }
}

fn propagate_field(field: &mut ComplexField, table: &[Complex64]) {
    let was_physical = field.is_physical();
    field.to_spectral_in_place();
    for (c, m) in field.values_mut().iter_mut().zip(table) {
        *c *= m;
    }
    if was_physical {
        field.to_physical_in_place();
    }
}

fn rotate_phases(state: &mut SystemState, tau: f64, params: &ModelParams) -> Result<()> {
    let rates = phase_rates(state, params)?;
    for (u, theta) in state.components_mut().iter_mut().zip(rates) {
        for (v, t) in u.values_mut().iter_mut().zip(theta) {
            if t != 0.0 {
                *v *= Complex64::from_polar(1.0, -tau * t);
            }
        }
    }
    Ok(())
}

/// Exact free Schrödinger flow `e^{iτΔ}` on every component; `τ` may be negative.
pub fn free_propagate(state: &SystemState, tau: f64) -> SystemState {
    let mut out = state.clone();
    let mut cache = PhaseCache::default();
    let table = cache.table(state.grid(), tau).to_vec();
    for u in out.components_mut() {
        propagate_field(u, &table);
    }
    out.time = state.time + tau;
    out
}

/// Exact nonlinear substep `u_j ↦ e^{-iτΘ_j} u_j`. Leaves the time unchanged
/// when used on its own; [`strang_step`] advances it.
pub fn nonlinear_phase_step(state: &SystemState, tau: f64, params: &ModelParams) -> Result<SystemState> {
    let mut out = state.to_physical();
    rotate_phases(&mut out, tau, params)?;
    Ok(out)
}

/// `free(dt/2) ∘ nonlinear(dt) ∘ free(dt/2)`, advancing the time by `dt`.
pub fn strang_step(state: &SystemState, dt: f64, params: &ModelParams) -> Result<SystemState> {
    if !(dt.is_finite() && dt != 0.0) {
        return Err(Error::InvalidParams(format!("dt must be nonzero and finite, got {dt}")));
    }
    let half = free_propagate(&state.to_physical(), 0.5 * dt);
    let mut mid = nonlinear_phase_step(&half, dt, params)?;
    mid.time = state.time;
    let mut out = free_propagate(&mid, 0.5 * dt);
    out.time = state.time + dt;
    Ok(out)
}

/// Repeated Strang steps from `state.time` to `config.t_end`.
///
/// `observe` sees the initial state, every `record_every`-th state and the
/// final state. Consecutive half linear steps between observations are
/// fused into one multiplier, which is the same map up to rounding. Non-finite
/// values are detected at every observation.
pub fn evolve<T, F>(
    state: &SystemState,
    params: &ModelParams,
    config: &StepConfig,
    mut observe: F,
) -> Result<(SystemState, Trajectory<T>)>
where
    F: FnMut(&SystemState) -> Result<T>,
{
    state.check_against(params)?;
    let t0 = state.time;
    config.validate(t0)?;
    let steps = config.step_count(t0);
    let grid = state.grid().clone();
    let mut cache = PhaseCache::default();

    let mut current = state.to_physical();
    let mut samples = vec![(t0, observe(&current)?)];
    if !current.is_finite() {
        return Err(Error::Divergence { time: t0 });
    }

    let mut pending = 0.0;
    for step in 0..steps {
        let start = t0 + step as f64 * config.dt;
        let end = if step + 1 == steps {
            config.t_end
        } else {
            t0 + (step + 1) as f64 * config.dt
        };
        let h = end - start;

        let table = cache.table(&grid, pending + 0.5 * h);
        for u in current.components_mut() {
            propagate_field(u, table);
        }
        if !config.free_flow {
            rotate_phases(&mut current, h, params)?;
        }
        pending = 0.5 * h;
        current.time = end;

        let done = step + 1 == steps;
        if done || (step + 1) % config.record_every == 0 {
            let table = cache.table(&grid, pending);
            for u in current.components_mut() {
                propagate_field(u, table);
            }
            pending = 0.0;
            if !current.is_finite() {
                return Err(Error::Divergence { time: end });
            }
            samples.push((end, observe(&current)?));
        }
    }
    Ok((current, Trajectory { samples }))
}
