mod common;

use cnls_core::diagnostics::{
    morawetz_interaction_direct, morawetz_interaction_fft, scattering_pullback, scattering_residual,
};
use cnls_core::model::SystemState;
use cnls_core::spectral::Grid;
use num_complex::Complex64;
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = (usize, usize)> {
    prop::sample::select(vec![(1usize, 16usize), (2, 8), (3, 6), (4, 4)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn direct_and_fft_interactions_agree((dim, n) in dims(), m in 1usize..=2, seed in any::<u64>(), l in 1.0f64..6.0) {
        let g = Grid::cubic(dim, n, l).unwrap();
        let s = common::random_state(&g, m, seed, 1.0);
        let d = morawetz_interaction_direct(&s).unwrap();
        let f = morawetz_interaction_fft(&s);
        prop_assert!((d.total() - f.total()).abs() <= 1e-12 * d.total());
        prop_assert!((d.diagonal - f.diagonal).abs() <= 1e-12 * d.diagonal);
        prop_assert!(d.off_diagonal > 0.0);
    }

    #[test]
    fn interaction_is_quartic_homogeneous((dim, n) in dims(), seed in any::<u64>()) {
        let g = Grid::cubic(dim, n, 3.0).unwrap();
        let s = common::random_state(&g, 2, seed, 1.0);
        let doubled = SystemState::new(
            0.0,
            s.components().iter().map(|u| u.scale(Complex64::new(2.0, 0.0))).collect(),
        )
        .unwrap();
        let a = morawetz_interaction_direct(&s).unwrap();
        let b = morawetz_interaction_direct(&doubled).unwrap();
        prop_assert_eq!(b.total(), 16.0 * a.total());
        let a = morawetz_interaction_fft(&s);
        let b = morawetz_interaction_fft(&doubled);
        prop_assert_eq!(b.total(), 16.0 * a.total());
    }

    #[test]
    fn residual_is_a_metric(seeds in prop::array::uniform3(any::<u64>())) {
        let g = Grid::cubic(2, 8, 4.0).unwrap();
        let [a, b, c] = seeds.map(|s| common::random_state(&g, 2, s, 1.0));
        let ab = scattering_residual(&a, &b).unwrap();
        prop_assert_eq!(scattering_residual(&a, &a).unwrap(), 0.0);
        prop_assert!((ab - scattering_residual(&b, &a).unwrap()).abs() <= 1e-14 * ab);
        let ac = scattering_residual(&a, &c).unwrap();
        let cb = scattering_residual(&c, &b).unwrap();
        prop_assert!(ab <= (ac + cb) * (1.0 + 1e-12));
    }

    #[test]
    fn pullback_is_an_isometry(seed in any::<u64>(), t in -5.0f64..5.0) {
        let g = Grid::cubic(2, 8, 4.0).unwrap();
        let mut a = common::random_state(&g, 1, seed, 1.0);
        let zero = SystemState::zeros(&g, 1);
        let before = scattering_residual(&a, &zero).unwrap();
        a.time = t;
        let after = scattering_residual(&scattering_pullback(&a), &zero).unwrap();
        prop_assert!((after - before).abs() <= 1e-12 * before);
    }
}
