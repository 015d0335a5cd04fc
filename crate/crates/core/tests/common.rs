#![allow(dead_code)]

use std::sync::Arc;

use cnls_core::model::SystemState;
use cnls_core::spectral::{ComplexField, Grid};
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_field(grid: &Arc<Grid>, rng: &mut ChaCha8Rng, amplitude: f64) -> ComplexField {
    let values = (0..grid.len())
        .map(|_| Complex64::new(rng.random_range(-amplitude..amplitude), rng.random_range(-amplitude..amplitude)))
        .collect();
    ComplexField::new(grid.clone(), values).unwrap()
}

/// Random data smoothed by a Gaussian spectral filter so that splitting
/// errors stay small.
pub fn smooth_field(grid: &Arc<Grid>, rng: &mut ChaCha8Rng, amplitude: f64) -> ComplexField {
    let mut u = random_field(grid, rng, amplitude).to_spectral();
    for (v, k2) in u.values_mut().iter_mut().zip(grid.k_squared()) {
        *v *= (-0.5 * k2).exp();
    }
    u.to_physical()
}

pub fn random_state(grid: &Arc<Grid>, m: usize, seed: u64, amplitude: f64) -> SystemState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SystemState::new(0.0, (0..m).map(|_| smooth_field(grid, &mut rng, amplitude)).collect()).unwrap()
}

pub fn max_state_diff(a: &SystemState, b: &SystemState) -> f64 {
    let a = a.to_physical();
    let b = b.to_physical();
    a.components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| x.max_abs_diff(y).unwrap())
        .fold(0.0, f64::max)
}
