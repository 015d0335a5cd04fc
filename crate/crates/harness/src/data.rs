//! Initial-data families and the analytic free Gaussian.

use std::f64::consts::TAU;
use std::sync::Arc;

use cnls_core::model::{ModelParams, SystemState};
use cnls_core::spectral::{ComplexField, Grid};
use cnls_core::Result;
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Bump, DataSpec};

/// Minimum-image displacement `x - c` per axis.
fn displacement(grid: &Grid, x: &[f64], c: &[f64], out: &mut [f64]) {
    for d in 0..x.len() {
        out[d] = grid.min_image(d, x[d] - c[d]);
    }
}

fn bump_field(grid: &Arc<Grid>, bump: &Bump, scale: f64) -> ComplexField {
    let mut z = vec![0.0; grid.dim()];
    let g = grid.clone();
    ComplexField::from_fn(grid.clone(), |x| {
        displacement(&g, x, &bump.center, &mut z);
        let r2: f64 = z.iter().map(|v| v * v).sum();
        let phase: f64 = z.iter().zip(&bump.velocity).map(|(a, b)| a * b).sum();
        Complex64::from_polar(scale * bump.amplitude * (-r2 / (2.0 * bump.width * bump.width)).exp(), phase)
    })
}

/// Builds the initial state of `m` components at time 0.
pub fn initial_state(spec: &DataSpec, grid: &Arc<Grid>, m: usize, seed: u64) -> Result<SystemState> {
    let components = match spec {
        DataSpec::Gaussian(bumps) => bumps.iter().map(|b| bump_field(grid, b, 1.0)).collect(),
        DataSpec::PlaneWave { modes, amplitudes } => {
            let k: Vec<f64> = modes
                .iter()
                .zip(grid.lengths())
                .map(|(&n, &l)| TAU * n as f64 / l)
                .collect();
            amplitudes
                .iter()
                .map(|&c| {
                    ComplexField::from_fn(grid.clone(), |x| {
                        let phase: f64 = x.iter().zip(&k).map(|(a, b)| a * b).sum();
                        Complex64::from_polar(c, phase)
                    })
                })
                .collect()
        }
        DataSpec::MultiBump { bumps, amplitudes } => amplitudes
            .iter()
            .map(|&a| {
                let mut u = ComplexField::zeros(grid.clone());
                for b in bumps {
                    let f = bump_field(grid, b, a);
                    for (v, w) in u.values_mut().iter_mut().zip(f.values()) {
                        *v += w;
                    }
                }
                u
            })
            .collect(),
        DataSpec::Random { amplitude } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..m).map(|_| random_field(grid, *amplitude, &mut rng)).collect()
        }
    };
    SystemState::new(0.0, components)
}

/// Independent uniform real and imaginary parts in `[-a, a]`.
pub fn random_field(grid: &Arc<Grid>, a: f64, rng: &mut ChaCha8Rng) -> ComplexField {
    let values = (0..grid.len())
        .map(|_| Complex64::new(rng.random_range(-a..=a), rng.random_range(-a..=a)))
        .collect();
    ComplexField::new(grid.clone(), values).expect("length matches grid")
}

/// Whole-space free evolution of a Gaussian bump, sampled on the torus
/// about the moving center:
/// `A (w²/s)^{N/2} exp(-|y|²/(2s) + i v·y + i|v|²t)`, `s = w² + 2it`,
/// `y = x - c - 2vt`.
pub fn free_gaussian(grid: &Arc<Grid>, bump: &Bump, t: f64) -> ComplexField {
    let dim = grid.dim();
    let w2 = bump.width * bump.width;
    let s = Complex64::new(w2, 2.0 * t);
    let prefactor = (Complex64::new(w2, 0.0) / s).powf(dim as f64 / 2.0) * bump.amplitude;
    let v2: f64 = bump.velocity.iter().map(|v| v * v).sum();
    let moved: Vec<f64> = bump
        .center
        .iter()
        .zip(&bump.velocity)
        .map(|(c, v)| c + 2.0 * v * t)
        .collect();
    let mut y = vec![0.0; dim];
    let g = grid.clone();
    ComplexField::from_fn(grid.clone(), |x| {
        displacement(&g, x, &moved, &mut y);
        let r2: f64 = y.iter().map(|v| v * v).sum();
        let vy: f64 = y.iter().zip(&bump.velocity).map(|(a, b)| a * b).sum();
        prefactor * (-r2 / (2.0 * s) + Complex64::new(0.0, vy + v2 * t)).exp()
    })
}

/// Closed-form solution for plane-wave data: every component keeps its
/// modulus, so `u_j = c_j e^{i k·x - i(|k|² + Θ_j) t}` with constant `Θ_j`.
pub fn plane_wave_solution(
    grid: &Arc<Grid>,
    modes: &[i64],
    amplitudes: &[f64],
    params: &ModelParams,
    t: f64,
) -> Vec<ComplexField> {
    let k: Vec<f64> = modes
        .iter()
        .zip(grid.lengths())
        .map(|(&n, &l)| TAU * n as f64 / l)
        .collect();
    let k2: f64 = k.iter().map(|v| v * v).sum();
    let p = params.p();
    amplitudes
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let theta = if c == 0.0 {
                0.0
            } else {
                let s: f64 = amplitudes
                    .iter()
                    .enumerate()
                    .map(|(i, &ci)| params.coupling().get(j, i) * ci.abs().powf(p))
                    .sum();
                s * c.abs().powf(p - 2.0)
            };
            ComplexField::from_fn(grid.clone(), |x| {
                let phase: f64 = x.iter().zip(&k).map(|(a, b)| a * b).sum();
                Complex64::from_polar(c, phase - (k2 + theta) * t)
            })
        })
        .collect()
}
