//! Morawetz-type spacetime quantities.

use num_complex::Complex64;

use crate::diagnostics::kernel::KernelTable;
use crate::error::{Error, Result};
use crate::model::SystemState;
use crate::spectral::{lp_integral, Grid};

/// Largest grid for the `O(M²)` pair sums.
pub const DIRECT_SUM_CAP: usize = 1 << 14;

/// `∫∫ ρ(x) ρ(y) / |x - y|³`, split into its self-interaction (diagonal cell)
/// part and the sum over distinct grid points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interaction {
    pub diagonal: f64,
    pub off_diagonal: f64,
}

impl Interaction {
    pub fn total(&self) -> f64 {
        self.diagonal + self.off_diagonal
    }
}

fn total_density(state: &SystemState) -> Vec<f64> {
    let phys = state.to_physical();
    let mut rho = vec![0.0; state.grid().len()];
    for u in phys.components() {
        for (r, v) in rho.iter_mut().zip(u.values()) {
            *r += v.norm_sqr();
        }
    }
    rho
}

fn check_cap(grid: &Grid) -> Result<()> {
    if grid.len() > DIRECT_SUM_CAP {
        return Err(Error::Size {
            points: grid.len(),
            cap: DIRECT_SUM_CAP,
        });
    }
    Ok(())
}

/// Flat index of the lattice offset `a - b` (per-axis, mod `n_d`).
fn offset_index(a: &[usize], b: &[usize], points: &[usize]) -> usize {
    let mut flat = 0;
    for d in 0..points.len() {
        let n = points[d];
        flat = flat * n + (a[d] + n - b[d]) % n;
    }
    flat
}

fn multi_indices(grid: &Grid) -> Vec<Vec<usize>> {
    (0..grid.len())
        .map(|f| {
            let mut idx = vec![0; grid.dim()];
            grid.unravel(f, &mut idx);
            idx
        })
        .collect()
}

fn diagonal_part(rho: &[f64], table: &KernelTable, w2: f64) -> f64 {
    table.diagonal() * rho.iter().map(|r| r * r).sum::<f64>() * w2
}

/// Direct pair sum of the interaction functional, `M ≤ 2^14`.
pub fn morawetz_interaction_direct(state: &SystemState) -> Result<Interaction> {
    let grid = state.grid();
    check_cap(grid)?;
    let table = KernelTable::for_grid(grid);
    let rho = total_density(state);
    let w2 = grid.cell_volume().powi(2);
    let idx = multi_indices(grid);
    let kernel = table.values();
    let mut off = 0.0;
    for (x, rx) in rho.iter().enumerate() {
        if *rx == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for (y, ry) in rho.iter().enumerate() {
            if x != y {
                row += ry * kernel[offset_index(&idx[x], &idx[y], grid.points())];
            }
        }
        off += rx * row;
    }
    Ok(Interaction {
        diagonal: diagonal_part(&rho, &table, w2),
        off_diagonal: off * w2,
    })
}

/// The same functional as [`morawetz_interaction_direct`], by FFT
/// convolution with the shared kernel table.
pub fn morawetz_interaction_fft(state: &SystemState) -> Interaction {
    let grid = state.grid();
    let table = KernelTable::for_grid(grid);
    let rho = total_density(state);
    let w2 = grid.cell_volume().powi(2);
    let mut conv: Vec<Complex64> = rho.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    grid.fft_in_place(&mut conv, false);
    for (c, k) in conv.iter_mut().zip(table.spectrum()) {
        *c *= k;
    }
    grid.fft_in_place(&mut conv, true);
    let scale = 1.0 / grid.len() as f64;
    let full: f64 = rho.iter().zip(&conv).map(|(r, c)| r * c.re * scale).sum::<f64>() * w2;
    let diagonal = diagonal_part(&rho, &table, w2);
    Interaction {
        diagonal,
        off_diagonal: full - diagonal,
    }
}

/// `Σ_j ‖u_j‖_{L⁴}⁴`.
pub fn morawetz_l4(state: &SystemState) -> Result<f64> {
    let phys = state.to_physical();
    phys.components().iter().map(|u| lp_integral(u, 4.0)).sum()
}

/// `Σ_j ‖u_j‖_{L⁸}⁴`, the two-dimensional analogue; homogeneous of degree 4.
pub fn morawetz_l8(state: &SystemState) -> Result<f64> {
    let phys = state.to_physical();
    phys.components()
        .iter()
        .map(|u| lp_integral(u, 8.0).map(f64::sqrt))
        .sum()
}

/// Morawetz action
/// `2 Σ_j Σ_{x≠y} (x-y)/|x-y| · (J_j(x) |u_j(y)|² - J_j(y) |u_j(x)|²) (Πh)²`
/// with momentum density `J = Im(ū ∇u)`, direct sum, `M ≤ 2^14`.
///
/// An axis offset of exactly half the box has two images; its component of
/// the direction vector is set to 0 so that the direction stays odd.
pub fn morawetz_action(state: &SystemState) -> Result<f64> {
    let grid = state.grid();
    check_cap(grid)?;
    let dim = grid.dim();
    let len = grid.len();
    let idx = multi_indices(grid);

    // Unit direction for each flat offset.
    let mut direction = vec![0.0; len * dim];
    for (f, off) in idx.iter().enumerate() {
        let mut r2 = 0.0;
        let mut comps = vec![0.0; dim];
        for d in 0..dim {
            let z = grid.min_image_offset(d, off[d] as isize);
            r2 += z * z;
            if 2 * off[d] != grid.points()[d] {
                comps[d] = z;
            }
        }
        if r2 > 0.0 {
            let r = r2.sqrt();
            for d in 0..dim {
                direction[f * dim + d] = comps[d] / r;
            }
        }
    }

    let w2 = grid.cell_volume().powi(2);
    let phys = state.to_physical();
    let mut total = 0.0;
    for u in phys.components() {
        let grads = u.spectral_gradient();
        let rho: Vec<f64> = u.values().iter().map(|v| v.norm_sqr()).collect();
        let current: Vec<f64> = (0..len)
            .flat_map(|x| {
                let ux = u.values()[x];
                grads.iter().map(move |g| (ux.conj() * g.values()[x]).im).collect::<Vec<_>>()
            })
            .collect();
        for x in 0..len {
            for y in 0..len {
                if x == y {
                    continue;
                }
                let dir = &direction[offset_index(&idx[x], &idx[y], grid.points()) * dim..][..dim];
                let mut s = 0.0;
                for d in 0..dim {
                    s += dir[d] * (current[x * dim + d] * rho[y] - current[y * dim + d] * rho[x]);
                }
                total += s;
            }
        }
    }
    Ok(2.0 * total * w2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ComplexField;

    fn two_point(v: f64, n: usize, l: f64, sep: usize) -> SystemState {
        let g = Grid::new(&[n, n, n, n], &[l; 4]).unwrap();
        let mut u = ComplexField::zeros(g.clone());
        u.values_mut()[0] = Complex64::new(v, 0.0);
        u.values_mut()[sep * g.stride(0)] = Complex64::new(v, 0.0);
        SystemState::new(0.0, vec![u]).unwrap()
    }

    #[test]
    fn two_point_off_diagonal() {
        let (v, n, l, sep) = (1.5, 8, 8.0, 3);
        let s = two_point(v, n, l, sep);
        let h4 = 1.0f64;
        let d = sep as f64;
        let expected = 2.0 * v.powi(4) * h4 * h4 / d.powi(3);
        let direct = morawetz_interaction_direct(&s).unwrap();
        assert!((direct.off_diagonal - expected).abs() < 1e-12 * expected);
        let fft = morawetz_interaction_fft(&s);
        assert!((fft.off_diagonal - expected).abs() < 1e-10 * expected);
        assert_eq!(fft.diagonal, direct.diagonal);
    }

    #[test]
    fn zero_state_is_zero() {
        let g = Grid::cubic(2, 8, 3.0).unwrap();
        let z = SystemState::zeros(&g, 2);
        assert_eq!(morawetz_interaction_direct(&z).unwrap().total(), 0.0);
        assert_eq!(morawetz_interaction_fft(&z).total(), 0.0);
        assert_eq!(morawetz_l4(&z).unwrap(), 0.0);
        assert_eq!(morawetz_l8(&z).unwrap(), 0.0);
        assert_eq!(morawetz_action(&z).unwrap(), 0.0);
    }

    #[test]
    fn direct_sum_capped() {
        let g = Grid::cubic(2, 256, 3.0).unwrap();
        let z = SystemState::zeros(&g, 1);
        assert!(matches!(morawetz_interaction_direct(&z), Err(Error::Size { .. })));
        assert!(matches!(morawetz_action(&z), Err(Error::Size { .. })));
    }

    #[test]
    fn real_data_has_no_action() {
        let g = Grid::cubic(2, 16, 8.0).unwrap();
        let u = ComplexField::from_fn(g, |x| Complex64::new((-(x[0] * x[0] + x[1] * x[1])).exp(), 0.0));
        let s = SystemState::new(0.0, vec![u]).unwrap();
        assert!(morawetz_action(&s).unwrap().abs() < 1e-14);
    }

    #[test]
    fn l4_plane_wave() {
        let g = Grid::cubic(1, 16, 2.0).unwrap();
        let u = ComplexField::from_fn(g, |x| Complex64::from_polar(2.0, std::f64::consts::PI * x[0]));
        let s = SystemState::new(0.0, vec![u]).unwrap();
        assert!((morawetz_l4(&s).unwrap() - 32.0).abs() < 1e-12);
        // (∫ 2^8)^{1/2} = (512)^{1/2}
        assert!((morawetz_l8(&s).unwrap() - 512f64.sqrt()).abs() < 1e-10);
    }
}
