use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::diagnostics::kernel::KernelTable;
use crate::error::{Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 4;

/// Uniform periodic box `[-L_d/2, L_d/2)` sampled with `n_d` points per axis.
///
/// Flat indices are row-major: the last axis varies fastest. Wavenumber
/// tables are stored in FFT order, `0, 1, ..., n/2-1, -n/2, ..., -1` times
/// `2π/L_d`.
pub struct Grid {
    points: Vec<usize>,
    lengths: Vec<f64>,
    spacing: Vec<f64>,
    wavenumbers: Vec<Vec<f64>>,
    derivative_wavenumbers: Vec<Vec<f64>>,
    k_squared: Vec<f64>,
    k_squared_derivative: Vec<f64>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
    pub(crate) kernel: OnceLock<Arc<KernelTable>>,
}

impl Grid {
    pub fn new(points: &[usize], lengths: &[f64]) -> Result<Arc<Self>> {
        let dim = points.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidParams(format!(
                "grid dimension must be in 1..={MAX_DIM}, got {dim}"
            )));
        }
        if lengths.len() != dim {
            return Err(Error::Shape(format!(
                "{dim} point counts but {} box lengths",
                lengths.len()
            )));
        }
        for (d, (&n, &l)) in points.iter().zip(lengths).enumerate() {
            if n == 0 || n % 2 != 0 {
                return Err(Error::InvalidParams(format!(
                    "points per dimension must be positive and even, axis {d} has {n}"
                )));
            }
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "box length must be positive and finite, axis {d} has {l}"
                )));
            }
        }

        let spacing: Vec<f64> = points
            .iter()
            .zip(lengths)
            .map(|(&n, &l)| l / n as f64)
            .collect();
        let wavenumbers: Vec<Vec<f64>> = points
            .iter()
            .zip(lengths)
            .map(|(&n, &l)| {
                (0..n)
                    .map(|i| TAU * signed_frequency(i, n) as f64 / l)
                    .collect()
            })
            .collect();
        // Nyquist entry zeroed for differentiation.
        let derivative_wavenumbers: Vec<Vec<f64>> = wavenumbers
            .iter()
            .zip(points)
            .map(|(k, &n)| {
                let mut k = k.clone();
                k[n / 2] = 0.0;
                k
            })
            .collect();

        let total: usize = points.iter().product();
        let mut k_squared = vec![0.0; total];
        let mut k_squared_derivative = vec![0.0; total];
        let mut index = vec![0usize; dim];
        for (ksq, kdsq) in k_squared.iter_mut().zip(&mut k_squared_derivative) {
            for (d, &i) in index.iter().enumerate() {
                *ksq += wavenumbers[d][i] * wavenumbers[d][i];
                *kdsq += derivative_wavenumbers[d][i] * derivative_wavenumbers[d][i];
            }
            advance(&mut index, points);
        }

        let mut planner = FftPlanner::new();
        let forward = points.iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inverse = points.iter().map(|&n| planner.plan_fft_inverse(n)).collect();

        Ok(Arc::new(Self {
            points: points.to_vec(),
            lengths: lengths.to_vec(),
            spacing,
            wavenumbers,
            derivative_wavenumbers,
            k_squared,
            k_squared_derivative,
            forward,
            inverse,
            kernel: OnceLock::new(),
        }))
    }

    /// Same point count `n` and box length `l` on every axis.
    pub fn cubic(dim: usize, n: usize, l: f64) -> Result<Arc<Self>> {
        Self::new(&vec![n; dim], &vec![l; dim])
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    /// Total number of grid points `M`.
    pub fn len(&self) -> usize {
        self.k_squared.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_squared.is_empty()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Physical quadrature weight `Π h_d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Spectral quadrature weight `1 / V`, paired with the forward transform
    /// normalization so that Parseval holds.
    pub fn spectral_weight(&self) -> f64 {
        1.0 / self.volume()
    }

    pub fn wavenumbers(&self, axis: usize) -> &[f64] {
        &self.wavenumbers[axis]
    }

    pub(crate) fn derivative_wavenumbers(&self, axis: usize) -> &[f64] {
        &self.derivative_wavenumbers[axis]
    }

    /// `|k|^2` for every flat spectral index.
    pub fn k_squared(&self) -> &[f64] {
        &self.k_squared
    }

    /// `Σ_d k_d^2` with each axis' Nyquist entry zeroed, matching
    /// [`ComplexField::spectral_gradient`](super::ComplexField::spectral_gradient).
    pub fn k_squared_derivative(&self) -> &[f64] {
        &self.k_squared_derivative
    }

    /// Stride of `axis` in the flat row-major layout.
    pub fn stride(&self, axis: usize) -> usize {
        self.points[axis + 1..].iter().product()
    }

    /// Per-axis index of flat position `flat`.
    pub fn unravel(&self, mut flat: usize, index: &mut [usize]) {
        for d in (0..self.dim()).rev() {
            index[d] = flat % self.points[d];
            flat /= self.points[d];
        }
    }

    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        -0.5 * self.lengths[axis] + i as f64 * self.spacing[axis]
    }

    /// Coordinates of every grid point in flat order, one `Vec` per point.
    pub fn coordinates(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        let mut index = vec![0usize; self.dim()];
        (0..self.len()).map(move |_| {
            let x = index
                .iter()
                .enumerate()
                .map(|(d, &i)| self.coordinate(d, i))
                .collect();
            advance(&mut index, &self.points);
            x
        })
    }

    /// Periodic minimum-image displacement along `axis` for an index offset.
    pub fn min_image_offset(&self, axis: usize, offset: isize) -> f64 {
        let n = self.points[axis] as isize;
        let mut o = offset.rem_euclid(n);
        if o > n / 2 {
            o -= n;
        }
        o as f64 * self.spacing[axis]
    }

    /// Periodic minimum-image displacement `x - y` for a physical coordinate
    /// difference along `axis`.
    pub fn min_image(&self, axis: usize, delta: f64) -> f64 {
        let l = self.lengths[axis];
        delta - l * (delta / l).round()
    }

    /// Geometry equality (point counts and box lengths).
    pub fn same_geometry(&self, other: &Grid) -> bool {
        self.points == other.points && self.lengths == other.lengths
    }

    /// Unnormalized multi-dimensional DFT in place.
    pub(crate) fn fft_in_place(&self, data: &mut [Complex64], inverse: bool) {
        debug_assert_eq!(data.len(), self.len());
        let plans = if inverse { &self.inverse } else { &self.forward };
        let mut lines: Vec<Complex64> = Vec::new();
        for (axis, plan) in plans.iter().enumerate() {
            let n = self.points[axis];
            let stride = self.stride(axis);
            if stride == 1 {
                plan.process(data);
                continue;
            }
            // Gather every line along `axis` contiguously, transform, scatter back.
            lines.resize(data.len(), Complex64::default());
            let block = n * stride;
            let mut w = 0;
            for base in (0..data.len()).step_by(block) {
                for s in 0..stride {
                    for i in 0..n {
                        lines[w] = data[base + i * stride + s];
                        w += 1;
                    }
                }
            }
            plan.process(&mut lines);
            let mut r = 0;
            for base in (0..data.len()).step_by(block) {
                for s in 0..stride {
                    for i in 0..n {
                        data[base + i * stride + s] = lines[r];
                        r += 1;
                    }
                }
            }
        }
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.same_geometry(other)
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("points", &self.points)
            .field("lengths", &self.lengths)
            .finish()
    }
}

/// Frequency of FFT slot `i` in `{-n/2, ..., n/2 - 1}`.
pub fn signed_frequency(i: usize, n: usize) -> isize {
    if i < n / 2 {
        i as isize
    } else {
        i as isize - n as isize
    }
}

/// Row-major odometer increment.
pub(crate) fn advance(index: &mut [usize], points: &[usize]) {
    for d in (0..index.len()).rev() {
        index[d] += 1;
        if index[d] < points[d] {
            return;
        }
        index[d] = 0;
    }
}
