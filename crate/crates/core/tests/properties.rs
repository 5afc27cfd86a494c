//! Randomized invariants.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinbus_core::format::fmt12;
use spinbus_core::memory::chi_profile;
use spinbus_core::models::{engineered_couplings, xy_chain_single_excitation};
use spinbus_core::spectral::{dense_spectrum, lowest_eigenpairs};
use spinbus_core::*;

fn random_sparse_symmetric(dim: usize, seed: u64) -> HamiltonianMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Vec::new();
    for i in 0..dim {
        t.push((i, i, rng.gen_range(-2.0..2.0)));
        for _ in 0..3 {
            let j = rng.gen_range(0..dim);
            if j != i {
                let v = rng.gen_range(-1.0..1.0);
                t.push((i, j, v));
                t.push((j, i, v));
            }
        }
    }
    HamiltonianMatrix::from_triplets(dim, t, "random")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn engineered_couplings_are_mirror_symmetric(half in 1usize..12, k in 0usize..4) {
        let n = 2 * half;
        let p = engineered_couplings(n, k).unwrap();
        prop_assert_eq!(p.couplings.len(), n - 1);
        prop_assert!(p.couplings.iter().all(|c| *c > 0.0));
        for i in 0..n - 1 {
            prop_assert!((p.couplings[i] - p.couplings[n - 2 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_is_bounded(n in 2usize..16, s in 0usize..16, t in 0usize..16, time in 0.0f64..10.0) {
        let (s, t) = (s % n + 1, t % n + 1);
        let h = xy_chain_single_excitation(&engineered_couplings(n, 0).unwrap());
        let tr = transfer_fidelity(&h, s, t, &[0.0, time]).unwrap();
        prop_assert!(tr.values.iter().all(|f| (-1e-12..=1.0 + 1e-12).contains(f)));
        let start = if s == t { 1.0 } else { 0.0 };
        prop_assert!((tr.values[0] - start).abs() < 1e-12);
    }

    #[test]
    fn lanczos_agrees_with_dense(dim in 70usize..160, seed in any::<u64>(), count in 1usize..5) {
        let h = random_sparse_symmetric(dim, seed);
        let dense = dense_spectrum(&h).unwrap();
        let krylov = lowest_eigenpairs(&h, count, 1e-9).unwrap();
        prop_assert!(krylov.values.len() >= count);
        for (a, b) in krylov.values.iter().zip(&dense.values) {
            prop_assert!((a - b).abs() < 1e-7, "{} vs {}", a, b);
        }
        prop_assert!(krylov.residuals.iter().all(|r| *r < 1e-8));
    }

    #[test]
    fn evolution_preserves_norm(n in 2usize..30, seed in any::<u64>(), t in 0.0f64..50.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let off: Vec<f64> = (1..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let h = HamiltonianMatrix::tridiagonal(&diag, &off, "random chain");
        let eig = dense_spectrum(&h).unwrap();
        let psi: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let before: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        let after: f64 = evolve_state(&eig, &psi, t).unwrap().iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((before - after).abs() < 1e-10 * before);
    }

    #[test]
    fn chi_weights_obey_parseval(n in 2usize..80, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lambda = 0.7;
        let profile: Vec<f64> = (0..n).map(|_| lambda * rng.gen_range(0.2..1.8)).collect();
        let modes = chi_profile(&profile, lambda);
        let r: Vec<f64> = profile.iter().map(|l| l / lambda).collect();
        let mean = r.iter().sum::<f64>() / n as f64;
        let second = r.iter().map(|x| x * x).sum::<f64>() / n as f64;
        prop_assert!((modes.total_weight() - (second - mean * mean)).abs() < 1e-10);
    }

    // the closed form overshoots 1 once gamma/g is above about 0.2
    #[test]
    fn storage_fidelity_starts_at_one_and_stays_bounded(ratio in 0.0f64..0.1, t in 0.0f64..20.0) {
        let g = 1.3;
        let f0 = analytic_storage_fidelity(0.0, ratio * g, g).unwrap();
        prop_assert!((f0 - 1.0).abs() < 1e-12);
        prop_assert!(analytic_storage_fidelity(t, ratio * g, g).unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn fmt12_round_trips(x in -1e12f64..1e12, scale in -30i32..30) {
        let v = x * 10f64.powi(scale);
        let back: f64 = fmt12(v).parse().unwrap();
        prop_assert!((back - v).abs() <= 1e-11 * v.abs());
    }

    #[test]
    fn ground_spin_matches_sublattice_imbalance(n in 2usize..5, b in any::<bool>(), j0 in 0.05f64..0.5) {
        let conn = if b { Connection::TypeA } else { Connection::TypeB };
        let spec = LadderSpec::new(n, 1.0, j0, conn).unwrap();
        prop_assert_eq!(lieb_ground_spin(&spec).unwrap().spin, Some(spec.predicted_ground_spin()));
    }
}
