//! Closed-form and literature values checked against the solvers.

use approx::assert_relative_eq;
use spinbus_core::models::SpinTerms;
use spinbus_core::spectral::{dense_spectrum, lowest_eigenpairs, tridiagonal_eigen};
use spinbus_core::*;

fn heisenberg(n: usize, periodic: bool) -> SpinTerms {
    let mut t = SpinTerms::new(n);
    let bonds = if periodic { n } else { n - 1 };
    for i in 0..bonds {
        t.heisenberg(i, (i + 1) % n, 1.0);
    }
    t
}

fn ground_energy(terms: &SpinTerms, n: usize, n_up: usize) -> f64 {
    let sector = SectorBasis::enumerate(n, n_up).unwrap();
    let h = terms.build(&sector, "heisenberg").unwrap();
    lowest_eigenpairs(&h, 1, 1e-9).unwrap().values[0]
}

#[test]
fn dimer_singlet_and_triplet() {
    let t = heisenberg(2, false);
    let sector = SectorBasis::enumerate(2, 1).unwrap();
    let eig = dense_spectrum(&t.build(&sector, "dimer").unwrap()).unwrap();
    assert_relative_eq!(eig.values[0], -0.75, epsilon = 1e-14);
    assert_relative_eq!(eig.values[1], 0.25, epsilon = 1e-14);
}

#[test]
fn four_site_ring() {
    assert_relative_eq!(ground_energy(&heisenberg(4, true), 4, 2), -2.0, epsilon = 1e-10);
}

#[test]
fn twelve_site_ring_literature_value() {
    assert_relative_eq!(ground_energy(&heisenberg(12, true), 12, 6), -5.387390917445, epsilon = 1e-9);
}

#[test]
fn sixteen_site_open_chain_literature_value() {
    assert_relative_eq!(ground_energy(&heisenberg(16, false), 16, 8), -6.911737145575, epsilon = 1e-9);
}

#[test]
fn uniform_hopping_band() {
    let n = 30;
    let (vals, vecs) = tridiagonal_eigen(&vec![0.0; n], &vec![1.0; n - 1]).unwrap();
    let mut exact: Vec<f64> = (1..=n)
        .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n + 1) as f64).cos())
        .collect();
    exact.sort_by(f64::total_cmp);
    for (a, b) in vals.iter().zip(&exact) {
        assert_relative_eq!(a, b, epsilon = 1e-12);
    }
    // standing wave sin(N pi j / (N + 1)) up to sign
    let norm = (2.0 / (n + 1) as f64).sqrt();
    for (j, v) in vecs[0].iter().enumerate() {
        let expected = norm * ((n * (j + 1)) as f64 * std::f64::consts::PI / (n + 1) as f64).sin();
        assert_relative_eq!(v.abs(), expected.abs(), epsilon = 1e-10);
    }
}

#[test]
fn lanczos_matches_dense_on_ladder() {
    let spec = LadderSpec::new(3, 1.0, 0.3, Connection::TypeA).unwrap();
    let sector = SectorBasis::enumerate(spec.total_sites(), spec.total_sites() / 2).unwrap();
    let h = spec.full_terms().build(&sector, "ladder").unwrap();
    let dense = dense_spectrum(&h).unwrap();
    let krylov = lowest_eigenpairs(&h, 6, 1e-10).unwrap();
    for (a, b) in krylov.values.iter().zip(&dense.values) {
        assert_relative_eq!(a, b, epsilon = 1e-9);
    }
}

#[test]
fn engineered_chain_transfers_every_site_to_its_mirror() {
    let n = 8;
    let h = models::xy_chain_single_excitation(&models::engineered_couplings(n, 0).unwrap());
    for s in 1..=n {
        let f = transfer_fidelity(&h, s, n + 1 - s, &[std::f64::consts::FRAC_PI_2]).unwrap();
        assert_relative_eq!(f.values[0], 1.0, epsilon = 1e-10);
    }
}

#[test]
fn two_level_storage_fidelity_closed_form() {
    // gamma = 0 is perfect storage at every time
    for t in [0.0, 0.3, 10.0] {
        assert_relative_eq!(analytic_storage_fidelity(t, 0.0, 0.7).unwrap(), 1.0, epsilon = 1e-14);
    }
    assert!(matches!(
        analytic_storage_fidelity(1.0, 2.0, 1.0),
        Err(SpinError::OutOfRegime { .. })
    ));
}
