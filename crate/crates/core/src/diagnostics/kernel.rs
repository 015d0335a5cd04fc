//! The `|x - y|^{-3}` interaction kernel on the periodic lattice.

use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::spectral::{advance, Grid};

/// Gauss–Legendre degree per axis for the diagonal cell integral.
const DIAGONAL_QUADRATURE_DEGREE: NonZeroUsize = NonZeroUsize::new(32).unwrap();

/// Kernel values indexed by flat lattice offset, plus their unnormalized DFT.
#[derive(Debug)]
pub struct KernelTable {
    values: Vec<f64>,
    spectrum: Vec<Complex64>,
}

impl KernelTable {
    fn build(grid: &Grid) -> Self {
        let dim = grid.dim();
        let mut values = vec![0.0; grid.len()];
        let mut index = vec![0usize; dim];
        for v in values.iter_mut() {
            let r2: f64 = (0..dim)
                .map(|d| grid.min_image_offset(d, index[d] as isize).powi(2))
                .sum();
            *v = if r2 == 0.0 { 0.0 } else { r2.powf(-1.5) };
            advance(&mut index, grid.points());
        }
        values[0] = diagonal_average(grid.spacing());
        let mut spectrum: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        grid.fft_in_place(&mut spectrum, false);
        Self { values, spectrum }
    }

    /// Shared table for `grid`, built on first use.
    pub fn for_grid(grid: &Grid) -> Arc<KernelTable> {
        grid.kernel.get_or_init(|| Arc::new(Self::build(grid))).clone()
    }

    /// Kernel value at flat offset index (per-axis offsets taken mod `n_d`).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn diagonal(&self) -> f64 {
        self.values[0]
    }

    pub(crate) fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }
}

/// Average of `|z|^{-3}` over the cell centered at the origin.
///
/// The cell is split into pyramids with apex at the origin, one per face.
/// In coordinates `z = s (w_1 b_1, ..., ±b_d, ..., w_N b_N)` with `b` the
/// half widths, each pyramid contributes `Π b · ∫ s^{N-4} ds · I_d` with
/// `I_d = ∫_{[-1,1]^{N-1}} (b_d² + Σ_e w_e² b_e²)^{-3/2} dw`.
///
/// For `N ≥ 4` the radial integral converges on `[0, 1]`. For `N ≤ 3` the
/// singularity is not integrable, so the average is taken over the cell
/// minus the concentric half-size cell, `s ∈ [1/2, 1]`.
pub fn diagonal_average(spacing: &[f64]) -> f64 {
    let dim = spacing.len();
    let b: Vec<f64> = spacing.iter().map(|h| 0.5 * h).collect();
    let b_prod: f64 = b.iter().product();
    let (s0, radial): (f64, f64) = match dim {
        1 => (0.5, 1.5),
        2 => (0.5, 1.0),
        3 => (0.5, std::f64::consts::LN_2),
        n => (0.0, 1.0 / (n as f64 - 3.0)),
    };
    let rule = GaussLegendre::new(DIAGONAL_QUADRATURE_DEGREE);
    let nodes = rule.as_node_weight_pairs();

    let mut integral = 0.0;
    for face in 0..dim {
        let others: Vec<f64> = (0..dim).filter(|&e| e != face).map(|e| b[e]).collect();
        let face_integral = tensor_quadrature(&nodes, &others, b[face] * b[face]);
        integral += 2.0 * b_prod * radial * face_integral;
    }
    let volume = 2f64.powi(dim as i32) * b_prod * (1.0 - s0.powi(dim as i32));
    integral / volume
}

/// `∫_{[-1,1]^k} (c + Σ_e w_e² b_e²)^{-3/2} dw` by a tensor Gauss rule.
fn tensor_quadrature(nodes: &[(f64, f64)], b: &[f64], c: f64) -> f64 {
    let k = b.len();
    if k == 0 {
        return c.powf(-1.5);
    }
    let n = nodes.len();
    let mut index = vec![0usize; k];
    let mut total = 0.0;
    for _ in 0..n.pow(k as u32) {
        let mut q = c;
        let mut w = 1.0;
        for e in 0..k {
            let (x, wx) = nodes[index[e]];
            q += x * x * b[e] * b[e];
            w *= wx;
        }
        total += w * q.powf(-1.5);
        for e in (0..k).rev() {
            index[e] += 1;
            if index[e] < n {
                break;
            }
            index[e] = 0;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_closed_form() {
        // 2 ∫_{b/2}^{b} z^{-3} dz / b = 3 / b³
        for h in [0.1, 1.0, 2.5] {
            let b: f64 = h / 2.0;
            let d = diagonal_average(&[h]);
            assert!((d - 3.0 / b.powi(3)).abs() < 1e-12 * d);
        }
    }

    #[test]
    fn two_dimensional_square_by_midpoint_oracle() {
        // Midpoint rule on the annular square region, well away from the origin.
        let h = 1.0;
        let n = 800;
        let cell = h / n as f64;
        let mut sum = 0.0;
        let mut area = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = -h / 2.0 + (i as f64 + 0.5) * cell;
                let y = -h / 2.0 + (j as f64 + 0.5) * cell;
                if x.abs().max(y.abs()) < h / 4.0 {
                    continue;
                }
                sum += (x * x + y * y).powf(-1.5) * cell * cell;
                area += cell * cell;
            }
        }
        let oracle = sum / area;
        let d = diagonal_average(&[h, h]);
        assert!((d - oracle).abs() < 1e-4 * oracle, "{d} vs {oracle}");
    }

    #[test]
    fn scales_as_inverse_cube_of_spacing() {
        for spacing in [vec![0.3, 0.5], vec![0.2, 0.3, 0.4], vec![1.0, 1.0, 1.0, 1.0]] {
            let d1 = diagonal_average(&spacing);
            let doubled: Vec<f64> = spacing.iter().map(|h| 2.0 * h).collect();
            let d2 = diagonal_average(&doubled);
            assert!((d1 / d2 - 8.0).abs() < 1e-10);
        }
    }

    #[test]
    fn four_dimensional_average_is_finite_and_exceeds_corner() {
        let h = 1.0;
        let d = diagonal_average(&[h; 4]);
        // The kernel is at least its value at the cell corner everywhere in the cell.
        assert!(d.is_finite() && d > 1.0);
    }

    #[test]
    fn table_matches_lattice_distances() {
        let g = Grid::new(&[8, 4], &[8.0, 2.0]).unwrap();
        let t = KernelTable::for_grid(&g);
        // offset (3, 1): distances 3 and 0.5
        let idx = 3 * 4 + 1;
        assert!((t.values()[idx] - (9.0f64 + 0.25).powf(-1.5)).abs() < 1e-15);
        // offset (5, 0) is the image at -3
        assert!((t.values()[5 * 4] - 27f64.recip()).abs() < 1e-15);
        assert!(Arc::ptr_eq(&t, &KernelTable::for_grid(&g)));
    }
}
