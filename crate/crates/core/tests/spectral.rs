mod common;

use cnls_core::spectral::{localized_l2_sup, lp_norm, sobolev_norm, Grid};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid_strategy() -> impl Strategy<Value = (Vec<usize>, Vec<f64>)> {
    (1usize..=3).prop_flat_map(|dim| {
        (
            prop::collection::vec(prop::sample::select(vec![2usize, 4, 6, 8, 12]), dim),
            prop::collection::vec(0.5f64..20.0, dim),
        )
    })
}

proptest! {
    #[test]
    fn dft_round_trip((points, lengths) in grid_strategy(), seed in any::<u64>()) {
        let g = Grid::new(&points, &lengths).unwrap();
        let u = common::random_field(&g, &mut ChaCha8Rng::seed_from_u64(seed), 1.0);
        let back = u.forward_dft().unwrap().inverse_dft().unwrap();
        prop_assert!(back.max_abs_diff(&u).unwrap() < 1e-13);
    }

    #[test]
    fn parseval((points, lengths) in grid_strategy(), seed in any::<u64>()) {
        let g = Grid::new(&points, &lengths).unwrap();
        let u = common::random_field(&g, &mut ChaCha8Rng::seed_from_u64(seed), 1.0);
        let physical: f64 = u.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * g.cell_volume();
        let spectral: f64 = u.to_spectral().values().iter().map(|v| v.norm_sqr()).sum::<f64>() / g.volume();
        prop_assert!((physical - spectral).abs() <= 1e-12 * physical);
        prop_assert!((sobolev_norm(&u, 0.0, false) - physical.sqrt()).abs() <= 1e-12 * physical.sqrt());
    }

    #[test]
    fn localized_mass_is_bounded_by_total((points, lengths) in grid_strategy(), seed in any::<u64>(), frac in 0.01f64..1.0) {
        let g = Grid::new(&points, &lengths).unwrap();
        let u = common::random_field(&g, &mut ChaCha8Rng::seed_from_u64(seed), 1.0);
        let min_len = lengths.iter().cloned().fold(f64::INFINITY, f64::min);
        let local = localized_l2_sup(&u, frac * min_len).unwrap();
        prop_assert!(local <= lp_norm(&u, 2.0).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn lp_norms_are_homogeneous(seed in any::<u64>(), r in 1.0f64..8.0, c in 0.1f64..10.0) {
        let g = Grid::cubic(2, 8, 3.0).unwrap();
        let u = common::random_field(&g, &mut ChaCha8Rng::seed_from_u64(seed), 1.0);
        let scaled = u.scale(c.into());
        let a = lp_norm(&scaled, r).unwrap();
        let b = c * lp_norm(&u, r).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b);
    }
}
