//! Free-flow pullback and the Gagliardo–Nirenberg ratio.

use crate::error::{Error, Result};
use crate::integrator::free_propagate;
use crate::model::SystemState;
use crate::spectral::{lp_integral, localized_l2_sup, sobolev_norm, ComplexField};

/// `v(t) = e^{-itΔ} u(t)`, returned with time 0.
pub fn scattering_pullback(state: &SystemState) -> SystemState {
    let mut v = free_propagate(state, -state.time);
    v.time = 0.0;
    v
}

/// `Σ_j ‖a_j - b_j‖_{H¹}` between two pulled-back states.
pub fn scattering_residual(a: &SystemState, b: &SystemState) -> Result<f64> {
    if a.m() != b.m() {
        return Err(Error::Shape(format!("{} vs {} components", a.m(), b.m())));
    }
    let mut total = 0.0;
    for (x, y) in a.components().iter().zip(b.components()) {
        let d = x.sub(y)?;
        total += sobolev_norm(&d, 1.0, false);
    }
    Ok(total)
}

/// `‖u‖_{L^{2+4/N}}^{2+4/N} / (‖u‖_{H¹}² · sup_Q ‖u‖_{L²(Q)}^{4/N})`, with cubes of
/// side `edge`. Zero data gives 0.
pub fn gn_ratio(u: &ComplexField, edge: f64) -> Result<f64> {
    let dim = u.grid().dim() as f64;
    let phys = u.to_physical();
    let r = 2.0 + 4.0 / dim;
    let lhs = lp_integral(&phys, r)?;
    let loc = localized_l2_sup(&phys, edge)?;
    if lhs == 0.0 {
        return Ok(0.0);
    }
    let h1 = sobolev_norm(&phys, 1.0, false);
    Ok(lhs / (h1 * h1 * loc.powf(4.0 / dim)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{evolve, StepConfig};
    use crate::model::{CouplingMatrix, ModelParams};
    use crate::spectral::Grid;
    use num_complex::Complex64;

    #[test]
    fn free_evolution_pulls_back_to_data() {
        let g = Grid::cubic(1, 128, 40.0).unwrap();
        let u = ComplexField::from_fn(g, |x| Complex64::from_polar((-x[0] * x[0]).exp(), 0.7 * x[0]));
        let s = SystemState::new(0.0, vec![u]).unwrap();
        let p = ModelParams::new(1, 3.into(), CouplingMatrix::uniform(1, 1.0).unwrap()).unwrap();
        let (fin, _) = evolve(&s, &p, &StepConfig::new(0.1, 2.0, 5).free(), |_| Ok(())).unwrap();
        let v = scattering_pullback(&fin);
        assert!(scattering_residual(&v, &s).unwrap() < 1e-12);
        assert_eq!(scattering_residual(&v, &v).unwrap(), 0.0);
    }

    #[test]
    fn residual_symmetric_and_rejects_shape() {
        let g = Grid::cubic(1, 16, 4.0).unwrap();
        let a = SystemState::new(0.0, vec![ComplexField::from_fn(g.clone(), |x| Complex64::new(x[0].cos(), 0.0))]).unwrap();
        let b = SystemState::zeros(&g, 1);
        let ab = scattering_residual(&a, &b).unwrap();
        assert_eq!(ab, scattering_residual(&b, &a).unwrap());
        assert!(ab > 0.0);
        assert!(scattering_residual(&a, &SystemState::zeros(&g, 2)).is_err());
    }

    #[test]
    fn gn_ratio_zero_and_scale_invariant() {
        let g = Grid::cubic(2, 32, 10.0).unwrap();
        assert_eq!(gn_ratio(&ComplexField::zeros(g.clone()), 2.0).unwrap(), 0.0);
        let u = ComplexField::from_fn(g, |x| Complex64::new((-(x[0] * x[0] + x[1] * x[1])).exp(), 0.0));
        let r1 = gn_ratio(&u, 2.0).unwrap();
        let r2 = gn_ratio(&u.scale(Complex64::new(3.0, 0.0)), 2.0).unwrap();
        assert!(r1 > 0.0);
        assert!((r1 - r2).abs() < 1e-12 * r1);
        assert!(gn_ratio(&u, 100.0).is_err());
    }
}
