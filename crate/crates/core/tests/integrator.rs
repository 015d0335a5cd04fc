mod common;

use cnls_core::integrator::{evolve, nonlinear_phase_step, strang_step, StepConfig};
use cnls_core::model::{masses, CouplingMatrix, Exponent, ModelParams};
use cnls_core::spectral::Grid;
use proptest::prelude::*;

fn params(m: usize, p: Exponent, seed: u64) -> ModelParams {
    let mut entries = vec![0.0; m * m];
    for j in 0..m {
        for k in j..m {
            let a = 0.5 + ((seed >> (j * 4 + k)) & 7) as f64 / 4.0;
            entries[j * m + k] = a;
            entries[k * m + j] = a;
        }
    }
    ModelParams::new(2, p, CouplingMatrix::new(m, entries).unwrap()).unwrap()
}

fn p_strategy() -> impl Strategy<Value = Exponent> {
    prop::sample::select(vec![Exponent::ratio(3, 2), Exponent::integer(2), Exponent::ratio(5, 2), Exponent::integer(3)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn strang_step_is_reversible(seed in any::<u64>(), m in 1usize..=3, p in p_strategy(), dt in 1e-3f64..2e-2) {
        let g = Grid::cubic(2, 16, 8.0).unwrap();
        let s = common::random_state(&g, m, seed, 1.0);
        let pr = params(m, p, seed);
        let forward = strang_step(&s, dt, &pr).unwrap();
        let back = strang_step(&forward, -dt, &pr).unwrap();
        prop_assert!(common::max_state_diff(&back, &s) < 1e-12);
        prop_assert!(back.time.abs() < 1e-15);
    }

    #[test]
    fn nonlinear_step_preserves_modulus(seed in any::<u64>(), m in 1usize..=3, p in p_strategy(), tau in -1.0f64..1.0) {
        let g = Grid::cubic(2, 8, 4.0).unwrap();
        let s = common::random_state(&g, m, seed, 2.0);
        let out = nonlinear_phase_step(&s, tau, &params(m, p, seed)).unwrap();
        for (a, b) in out.components().iter().zip(s.components()) {
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x.norm() - y.norm()).abs() <= 1e-14 * (1.0 + y.norm()));
            }
        }
    }

    #[test]
    fn masses_are_conserved(seed in any::<u64>(), m in 1usize..=3, p in p_strategy()) {
        let g = Grid::cubic(2, 16, 8.0).unwrap();
        let s = common::random_state(&g, m, seed, 1.0);
        let pr = params(m, p, seed);
        let (end, _) = evolve(&s, &pr, &StepConfig::new(1e-2, 0.2, 5), |st| Ok(masses(st))).unwrap();
        for (a, b) in masses(&end).iter().zip(masses(&s)) {
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
        }
    }

    #[test]
    fn permutation_commutes_with_the_step(seed in any::<u64>(), p in p_strategy(), perm in Just(vec![0usize, 1, 2]).prop_shuffle()) {
        let g = Grid::cubic(2, 16, 8.0).unwrap();
        let s = common::random_state(&g, 3, seed, 1.0);
        let pr = params(3, p, seed);
        let a = strang_step(&s, 1e-2, &pr).unwrap().permuted(&perm).unwrap();
        let b = strang_step(&s.permuted(&perm).unwrap(), 1e-2, &pr.permuted(&perm).unwrap()).unwrap();
        prop_assert!(common::max_state_diff(&a, &b) < 1e-12);
    }
}
