//! The nonlinearity and the conserved/monitored functionals.

use crate::error::Result;
use crate::model::params::{ModelParams, SystemState};
use crate::spectral::ComplexField;

/// Below this modulus `|u_j|^{p-2}` is replaced by its limit value 0.
pub const MODULUS_FLOOR: f64 = 1e-30;

/// `|u|^e` from `r2 = |u|^2`, with exact fast paths for small integer `e`.
#[inline]
pub(crate) fn modulus_pow(r2: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e == 1.0 {
        r2.sqrt()
    } else if e == 2.0 {
        r2
    } else if e == 3.0 {
        r2 * r2.sqrt()
    } else if e == 4.0 {
        r2 * r2
    } else {
        r2.powf(0.5 * e)
    }
}

/// Pointwise real rates `Θ_j = Σ_k a_jk |u_k|^p |u_j|^{p-2}`, one vector per
/// component, so that the nonlinearity is `F_j = Θ_j u_j`.
pub fn phase_rates(state: &SystemState, params: &ModelParams) -> Result<Vec<Vec<f64>>> {
    state.check_against(params)?;
    for c in state.components() {
        c.require_physical("nonlinearity")?;
    }
    let p = params.p();
    let m = state.m();
    let len = state.grid().len();
    let floor_sq = MODULUS_FLOOR * MODULUS_FLOOR;

    let r2: Vec<Vec<f64>> = state
        .components()
        .iter()
        .map(|c| c.values().iter().map(|v| v.norm_sqr()).collect())
        .collect();
    let powp: Vec<Vec<f64>> = r2
        .iter()
        .map(|r| r.iter().map(|&x| modulus_pow(x, p)).collect())
        .collect();

    let mut rates = vec![vec![0.0; len]; m];
    for (j, rate) in rates.iter_mut().enumerate() {
        let row = params.coupling().row(j);
        for (x, theta) in rate.iter_mut().enumerate() {
            let rj = r2[j][x];
            if rj <= floor_sq {
                continue;
            }
            let mut s = 0.0;
            for (k, &a) in row.iter().enumerate() {
                s += a * powp[k][x];
            }
            *theta = s * modulus_pow(rj, p - 2.0);
        }
    }
    Ok(rates)
}

/// `F_j = (Σ_k a_jk |u_k|^p) |u_j|^{p-2} u_j`, exactly 0 where `|u_j| ≤ 1e-30`.
pub fn nonlinearity(state: &SystemState, params: &ModelParams) -> Result<Vec<ComplexField>> {
    let rates = phase_rates(state, params)?;
    Ok(state
        .components()
        .iter()
        .zip(rates)
        .map(|(u, theta)| {
            let mut f = u.clone();
            for (v, t) in f.values_mut().iter_mut().zip(theta) {
                *v *= t;
            }
            f
        })
        .collect())
}

/// `∫|u_j|²`.
pub fn mass(state: &SystemState, j: usize) -> Result<f64> {
    Ok(field_mass(state.component(j)?))
}

pub(crate) fn field_mass(u: &ComplexField) -> f64 {
    let grid = u.grid();
    let sum: f64 = u.values().iter().map(|v| v.norm_sqr()).sum();
    if u.is_physical() {
        sum * grid.cell_volume()
    } else {
        sum * grid.spectral_weight()
    }
}

/// `∫|∇u|²` by spectral quadrature, consistent with
/// [`ComplexField::spectral_gradient`] (Nyquist modes excluded).
pub fn gradient_energy(u: &ComplexField) -> f64 {
    let spec = u.to_spectral();
    let grid = u.grid();
    let sum: f64 = spec
        .values()
        .iter()
        .zip(grid.k_squared_derivative())
        .map(|(c, &k2)| k2 * c.norm_sqr())
        .sum();
    sum * grid.spectral_weight()
}

/// `ξ(u) = Σ_j ∫|∇u_j|²`.
pub fn xi(state: &SystemState) -> f64 {
    state.components().iter().map(gradient_energy).sum()
}

/// Interaction part `(1/(2p)) Σ_jk a_jk ∫|u_j|^p |u_k|^p`.
pub fn potential_energy(state: &SystemState, params: &ModelParams) -> Result<f64> {
    state.check_against(params)?;
    let phys = state.to_physical();
    let p = params.p();
    let powp: Vec<Vec<f64>> = phys
        .components()
        .iter()
        .map(|c| c.values().iter().map(|v| modulus_pow(v.norm_sqr(), p)).collect())
        .collect();
    let mut total = 0.0;
    for (j, pj) in powp.iter().enumerate() {
        for (k, pk) in powp.iter().enumerate() {
            let a = params.coupling().get(j, k);
            let s: f64 = pj.iter().zip(pk).map(|(x, y)| x * y).sum();
            total += a * s;
        }
    }
    Ok(total * state.grid().cell_volume() / (2.0 * p))
}

/// `E(u) = ½ Σ_j ∫ (|∇u_j|² + (1/p) Σ_k a_jk |u_j|^p |u_k|^p)`.
pub fn energy(state: &SystemState, params: &ModelParams) -> Result<f64> {
    let potential = potential_energy(state, params)?;
    Ok(0.5 * xi(state) + potential)
}

/// Total mass of every component, in order.
pub fn masses(state: &SystemState) -> Vec<f64> {
    state.components().iter().map(field_mass).collect()
}
