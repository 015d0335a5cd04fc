//! Time horizon over which a periodic computation can stand in for the
//! problem on the whole space.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::model::SystemState;
use crate::spectral::advance;

/// Fraction of mass that defines the support radius and significant wavenumber.
pub const DEFAULT_ENERGY_FRACTION: f64 = 0.999;

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityWindow {
    /// `(min_d L_d/2 - R) / (2 k_sig)`; 0 when the data is not localized.
    pub t_valid: f64,
    pub support_radius: f64,
    pub k_sig: f64,
    pub center: Vec<f64>,
    pub warning: Option<String>,
}

/// Estimates how long the data stays away from the box edges.
///
/// `R` is the smallest radius (about the periodic center of mass) outside of
/// which at most `1 - fraction` of the total mass lies; `k_sig` is the same
/// quantity for the spectral mass distribution. Mass travels at group
/// velocity `2|k|`.
pub fn validity_window(state: &SystemState, fraction: f64) -> Result<ValidityWindow> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Domain(format!("mass fraction must lie in (0, 1), got {fraction}")));
    }
    let grid = state.grid().clone();
    let dim = grid.dim();
    let phys = state.to_physical();
    let mut density = vec![0.0; grid.len()];
    for u in phys.components() {
        for (d, v) in density.iter_mut().zip(u.values()) {
            *d += v.norm_sqr();
        }
    }
    let total: f64 = density.iter().sum();
    if total == 0.0 {
        return Ok(ValidityWindow {
            t_valid: f64::INFINITY,
            support_radius: 0.0,
            k_sig: 0.0,
            center: vec![0.0; dim],
            warning: None,
        });
    }
    let budget = (1.0 - fraction) * total;

    // Circular mean per axis.
    let mut sums = vec![(0.0f64, 0.0f64); dim];
    let mut index = vec![0usize; dim];
    for &rho in &density {
        for d in 0..dim {
            let theta = TAU * index[d] as f64 / grid.points()[d] as f64;
            sums[d].0 += rho * theta.cos();
            sums[d].1 += rho * theta.sin();
        }
        advance(&mut index, grid.points());
    }
    let center: Vec<f64> = sums
        .iter()
        .enumerate()
        .map(|(d, &(c, s))| {
            let theta = s.atan2(c).rem_euclid(TAU);
            -0.5 * grid.lengths()[d] + theta / TAU * grid.lengths()[d]
        })
        .collect();

    let mut radial: Vec<(f64, f64)> = Vec::with_capacity(grid.len());
    index.fill(0);
    for &rho in &density {
        let r2: f64 = (0..dim)
            .map(|d| grid.min_image(d, grid.coordinate(d, index[d]) - center[d]).powi(2))
            .sum();
        radial.push((r2.sqrt(), rho));
        advance(&mut index, grid.points());
    }
    let support_radius = tail_radius(&mut radial, budget);

    let mut spectral = vec![0.0; grid.len()];
    for u in state.components() {
        let c = u.to_spectral();
        for (d, v) in spectral.iter_mut().zip(c.values()) {
            *d += v.norm_sqr();
        }
    }
    let spectral_total: f64 = spectral.iter().sum();
    let mut radial: Vec<(f64, f64)> = grid
        .k_squared()
        .iter()
        .zip(&spectral)
        .map(|(&k2, &w)| (k2.sqrt(), w))
        .collect();
    let k_sig = tail_radius(&mut radial, (1.0 - fraction) * spectral_total);

    let half_box = grid.lengths().iter().cloned().fold(f64::INFINITY, f64::min) / 2.0;
    if support_radius >= half_box {
        return Ok(ValidityWindow {
            t_valid: 0.0,
            support_radius,
            k_sig,
            center,
            warning: Some(format!(
                "data not localized: support radius {support_radius} reaches the half box {half_box}"
            )),
        });
    }
    let t_valid = if k_sig == 0.0 {
        f64::INFINITY
    } else {
        (half_box - support_radius) / (2.0 * k_sig)
    };
    Ok(ValidityWindow {
        t_valid,
        support_radius,
        k_sig,
        center,
        warning: None,
    })
}

/// Smallest radius with at most `budget` weight strictly beyond it. The tail
/// is accumulated from the outside so that tiny budgets are resolved.
fn tail_radius(samples: &mut [(f64, f64)], budget: f64) -> f64 {
    samples.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut outside = 0.0;
    let mut i = 0;
    while i < samples.len() {
        let r = samples[i].0;
        let mut shell = 0.0;
        let mut j = i;
        while j < samples.len() && samples[j].0 == r {
            shell += samples[j].1;
            j += 1;
        }
        if outside + shell > budget {
            return r;
        }
        outside += shell;
        i = j;
    }
    0.0
}
