use crate::error::{Error, Result};
use crate::model::exponents::{Exponent, ScalingKind};
use crate::spectral::{ComplexField, Grid};

/// Dilation `u ↦ λ^α u(λ x)` with `α` given by `kind`.
///
/// The result lives on a box shrunk by `λ` with the same point counts, so
/// the new grid points `x'` satisfy `λ x' = x` and samples carry over
/// without interpolation. Homogeneous Sobolev norms at the critical index of
/// `kind` are invariant, and the mass scales by `λ^{2α - N}`.
pub fn rescale_initial_data(
    fields: &[ComplexField],
    lambda: f64,
    p: Exponent,
    kind: ScalingKind,
) -> Result<Vec<ComplexField>> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!("scaling factor must be positive, got {lambda}")));
    }
    let first = fields
        .first()
        .ok_or_else(|| Error::Empty("no fields to rescale".into()))?;
    if lambda == 1.0 {
        return Ok(fields.to_vec());
    }
    let grid = first.grid();
    let lengths: Vec<f64> = grid.lengths().iter().map(|l| l / lambda).collect();
    let shrunk = Grid::new(grid.points(), &lengths)?;
    let amplitude = lambda.powf(kind.amplitude_exponent(p).to_f64());
    fields
        .iter()
        .map(|f| {
            first.require_same_grid(f)?;
            let values = f.to_physical().values().iter().map(|v| v * amplitude).collect();
            ComplexField::new(shrunk.clone(), values)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{critical_index, functionals::field_mass};
    use crate::spectral::sobolev_norm;
    use num_complex::Complex64;

    fn gaussian(n: usize, l: f64) -> ComplexField {
        let g = Grid::cubic(3, n, l).unwrap();
        ComplexField::from_fn(g, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::from_polar((-r2 / 2.0).exp(), 0.3 * x[0])
        })
    }

    #[test]
    fn identity_at_one() {
        let u = gaussian(8, 6.0);
        let v = rescale_initial_data(&[u.clone()], 1.0, 3.into(), ScalingKind::System).unwrap();
        assert_eq!(v[0].values(), u.values());
        assert!(rescale_initial_data(&[u.clone()], 0.0, 3.into(), ScalingKind::System).is_err());
        assert!(rescale_initial_data(&[u], -2.0, 3.into(), ScalingKind::System).is_err());
    }

    #[test]
    fn critical_norm_invariant_for_system_scaling() {
        let u = gaussian(32, 16.0);
        let p = Exponent::integer(3);
        let s = critical_index(p, 3, ScalingKind::System).unwrap();
        assert_eq!(s, 1.0);
        let v = rescale_initial_data(&[u.clone()], 2.0, p, ScalingKind::System).unwrap();
        let before = sobolev_norm(&u, s, true);
        let after = sobolev_norm(&v[0], s, true);
        assert!((before - after).abs() < 1e-6 * before);
    }

    #[test]
    fn mass_scales_by_power() {
        let u = gaussian(16, 12.0);
        for kind in [ScalingKind::System, ScalingKind::SingleEquation] {
            let p = Exponent::ratio(5, 2);
            let lambda = 1.7;
            let alpha = kind.amplitude_exponent(p).to_f64();
            let v = rescale_initial_data(&[u.clone()], lambda, p, kind).unwrap();
            let expected = field_mass(&u) * lambda.powf(2.0 * alpha - 3.0);
            assert!((field_mass(&v[0]) - expected).abs() < 1e-12 * expected);
        }
    }
}
