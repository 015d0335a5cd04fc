use std::sync::Arc;

use num_complex::Complex64;

use super::grid::{advance, Grid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Spectral,
}

/// One complex component sampled on a [`Grid`], either as point values or as
/// Fourier coefficients.
///
/// Spectral coefficients approximate the continuous transform
/// `û(k) = ∫ u(x) e^{-ik·x} dx` (taken with the phase origin at the first grid
/// point), so that `Σ|u|²·Πh = Σ|û|²/V`.
#[derive(Debug, Clone)]
pub struct ComplexField {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
    repr: Representation,
}

impl ComplexField {
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        Self::with_representation(grid, values, Representation::Physical)
    }

    pub fn with_representation(
        grid: Arc<Grid>,
        values: Vec<Complex64>,
        repr: Representation,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values, repr })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let values = vec![Complex64::default(); grid.len()];
        Self {
            grid,
            values,
            repr: Representation::Physical,
        }
    }

    /// Samples `f` at every grid coordinate.
    pub fn from_fn(grid: Arc<Grid>, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let dim = grid.dim();
        let mut index = vec![0usize; dim];
        let mut x = vec![0.0; dim];
        let mut values = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            for d in 0..dim {
                x[d] = grid.coordinate(d, index[d]);
            }
            values.push(f(&x));
            advance(&mut index, grid.points());
        }
        Self {
            grid,
            values,
            repr: Representation::Physical,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn is_physical(&self) -> bool {
        self.repr == Representation::Physical
    }

    pub(crate) fn require_physical(&self, op: &str) -> Result<()> {
        if self.is_physical() {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "{op} requires a field in physical representation"
            )))
        }
    }

    pub(crate) fn require_same_grid(&self, other: &ComplexField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_geometry(&other.grid) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "grids differ: {:?} vs {:?}",
                self.grid, other.grid
            )))
        }
    }

    /// Forward transform; the field must be in physical representation.
    pub fn forward_dft(&self) -> Result<ComplexField> {
        self.require_physical("forward_dft")?;
        let mut out = self.clone();
        out.to_spectral_in_place();
        Ok(out)
    }

    /// Inverse transform; the field must be in spectral representation.
    pub fn inverse_dft(&self) -> Result<ComplexField> {
        if self.is_physical() {
            return Err(Error::Usage(
                "inverse_dft requires a field in spectral representation".into(),
            ));
        }
        let mut out = self.clone();
        out.to_physical_in_place();
        Ok(out)
    }

    /// Converts to spectral representation if necessary.
    pub fn to_spectral_in_place(&mut self) {
        if self.repr == Representation::Spectral {
            return;
        }
        self.grid.fft_in_place(&mut self.values, false);
        let w = self.grid.cell_volume();
        for v in &mut self.values {
            *v *= w;
        }
        self.repr = Representation::Spectral;
    }

    /// Converts to physical representation if necessary.
    pub fn to_physical_in_place(&mut self) {
        if self.repr == Representation::Physical {
            return;
        }
        self.grid.fft_in_place(&mut self.values, true);
        let w = self.grid.spectral_weight();
        for v in &mut self.values {
            *v *= w;
        }
        self.repr = Representation::Physical;
    }

    pub fn to_physical(&self) -> ComplexField {
        let mut out = self.clone();
        out.to_physical_in_place();
        out
    }

    pub fn to_spectral(&self) -> ComplexField {
        let mut out = self.clone();
        out.to_spectral_in_place();
        out
    }

    /// Spectral derivative along every axis, returned in physical
    /// representation. Multiplication by `i k_d` with the Nyquist mode zeroed.
    pub fn spectral_gradient(&self) -> Vec<ComplexField> {
        let spec = self.to_spectral();
        (0..self.grid.dim())
            .map(|axis| {
                let mut d = spec.clone();
                let k = self.grid.derivative_wavenumbers(axis);
                let n = self.grid.points()[axis];
                let stride = self.grid.stride(axis);
                for (flat, v) in d.values.iter_mut().enumerate() {
                    let kd = k[(flat / stride) % n];
                    *v = Complex64::new(-kd * v.im, kd * v.re);
                }
                d.to_physical_in_place();
                d
            })
            .collect()
    }

    /// Pointwise `|u|^2`; physical representation required.
    pub fn density(&self) -> Result<Vec<f64>> {
        self.require_physical("density")?;
        Ok(self.values.iter().map(|v| v.norm_sqr()).collect())
    }

    pub fn scale(&self, factor: Complex64) -> ComplexField {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= factor;
        }
        out
    }

    pub fn conj(&self) -> Result<ComplexField> {
        self.require_physical("conj")?;
        let mut out = self.clone();
        for v in &mut out.values {
            *v = v.conj();
        }
        Ok(out)
    }

    /// `self - other`, both in the same representation on the same grid.
    pub fn sub(&self, other: &ComplexField) -> Result<ComplexField> {
        self.require_same_grid(other)?;
        if self.repr != other.repr {
            return Err(Error::Usage("subtracting fields in different representations".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn max_abs_diff(&self, other: &ComplexField) -> Result<f64> {
        self.require_same_grid(other)?;
        if self.repr != other.repr {
            return Err(Error::Usage("comparing fields in different representations".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn grid_1d(n: usize) -> Arc<Grid> {
        Grid::new(&[n], &[TAU]).unwrap()
    }

    #[test]
    fn constant_has_only_dc_content() {
        let g = Grid::new(&[8, 6], &[3.0, 2.0]).unwrap();
        let c = Complex64::new(0.7, -1.2);
        let spec = ComplexField::from_fn(g.clone(), |_| c).forward_dft().unwrap();
        assert_eq!(spec.representation(), Representation::Spectral);
        for (i, v) in spec.values().iter().enumerate() {
            if i == 0 {
                assert!((v - c * g.volume()).norm() < 1e-13);
            } else {
                assert!(v.norm() < 1e-13, "mode {i}: {v}");
            }
        }
    }

    #[test]
    fn lattice_exponential_has_one_coefficient() {
        let g = Grid::new(&[16, 8], &[TAU, 2.0 * TAU]).unwrap();
        let (k0, k1) = (3.0, -1.5);
        let spec = ComplexField::from_fn(g.clone(), |x| {
            Complex64::from_polar(1.0, k0 * x[0] + k1 * x[1])
        })
        .forward_dft()
        .unwrap();
        let nonzero: Vec<usize> = spec
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() > 1e-10)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(nonzero.len(), 1);
        let mut idx = [0; 2];
        g.unravel(nonzero[0], &mut idx);
        assert_eq!(g.wavenumbers(0)[idx[0]], k0);
        assert_eq!(g.wavenumbers(1)[idx[1]], k1);
    }

    #[test]
    fn representation_misuse_is_usage_error() {
        let f = ComplexField::zeros(grid_1d(8));
        let s = f.forward_dft().unwrap();
        assert!(matches!(s.forward_dft(), Err(Error::Usage(_))));
        assert!(matches!(f.inverse_dft(), Err(Error::Usage(_))));
        assert!(matches!(s.density(), Err(Error::Usage(_))));
    }

    #[test]
    fn gradient_of_sine_is_cosine() {
        let g = grid_1d(64);
        let f = ComplexField::from_fn(g, |x| Complex64::new(x[0].sin(), 0.0));
        let grad = f.spectral_gradient();
        assert_eq!(grad.len(), 1);
        let err = grad[0]
            .values()
            .iter()
            .zip(f.grid().coordinates())
            .map(|(v, x)| (v - Complex64::new(x[0].cos(), 0.0)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let g = Grid::new(&[8, 8, 4], &[1.0, 2.0, 3.0]).unwrap();
        let f = ComplexField::from_fn(g, |_| Complex64::new(2.0, 1.0));
        for d in f.spectral_gradient() {
            assert!(d.values().iter().all(|v| v.norm() < 1e-13));
        }
    }

    #[test]
    fn exponential_is_eigenfunction() {
        let g = grid_1d(32);
        let f = ComplexField::from_fn(g, |x| Complex64::from_polar(1.0, 2.0 * x[0]));
        let grad = &f.spectral_gradient()[0];
        for (d, u) in grad.values().iter().zip(f.values()) {
            assert!((d - Complex64::new(0.0, 2.0) * u).norm() < 1e-12);
        }
    }

    #[test]
    fn nyquist_mode_derivative_is_zero() {
        let g = grid_1d(16);
        // cos(8x) sampled on 16 points is the pure Nyquist mode.
        let f = ComplexField::from_fn(g, |x| Complex64::new((8.0 * x[0]).cos(), 0.0));
        assert!(f.spectral_gradient()[0].values().iter().all(|v| v.norm() < 1e-12));
    }
}
