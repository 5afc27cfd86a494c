use crate::error::{Result, SpinError};
use crate::matrix::HamiltonianMatrix;
use crate::memory::{chi_profile, dispersion};
use crate::models::ring::MemoryParams;

/// One-excitation block of the spin-boson model with mode leakage.
///
/// Basis: index 0 is `|+, vac>`, index `k` (1..=N) is `|-, 1_k>`, with
/// `k = N` the symmetric storage mode. Mode `k < N` couples with strength
/// `g |chi_k|`; the phase of `chi_k` is absorbed into the mode operator, which
/// leaves every transition probability unchanged. The storage mode couples
/// with `g`. Energies are measured from `|-, vac>` at `-Omega/2`.
pub fn magnon_mode_hamiltonian(params: &MemoryParams, lambda_profile: &[f64]) -> Result<HamiltonianMatrix> {
    params.validate()?;
    let n = params.n;
    if lambda_profile.len() != n {
        return Err(SpinError::domain(format!(
            "hyperfine profile has {} entries for a ring of {n}",
            lambda_profile.len()
        )));
    }
    let modes = chi_profile(lambda_profile, params.lambda);
    let g = params.g();
    let omega = params.omega();
    let mut t = Vec::with_capacity(3 * n + 1);
    t.push((0, 0, 0.5 * omega));
    for k in 1..=n {
        let wk = dispersion(params, k)?;
        t.push((k, k, -0.5 * omega + wk));
        let c = if k == n { g } else { g * modes.chi[k - 1].norm() };
        if c != 0.0 {
            t.push((0, k, c));
            t.push((k, 0, c));
        }
    }
    Ok(HamiltonianMatrix::from_triplets(
        n + 1,
        t,
        format!("magnon_modes(N={n}, g={g})"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::gaussian_lambda_profile;

    #[test]
    fn homogeneous_profile_couples_only_storage_mode() {
        let p = MemoryParams::homogeneous(6, 1.0, 0.5, 0.5);
        let h = magnon_mode_hamiltonian(&p, &p.lambda_profile()).unwrap();
        for (r, c, v) in h.entries() {
            if r != c {
                assert!(
                    (r == 0 && c == 6) || (r == 6 && c == 0) || v.abs() < 1e-15,
                    "({r},{c}) = {v}"
                );
            }
        }
        assert!((h.get(0, 6) - p.g()).abs() < 1e-15);
    }

    #[test]
    fn zero_profile_keeps_only_storage_coupling() {
        let p = MemoryParams::homogeneous(6, 1.0, 0.5, 0.5);
        let h = magnon_mode_hamiltonian(&p, &[0.0; 6]).unwrap();
        // chi vanishes, but the storage mode coupling g is set by lambda
        let offdiag: Vec<_> = h.entries().into_iter().filter(|e| e.0 != e.1).collect();
        assert_eq!(offdiag.len(), 2);
    }

    #[test]
    fn gaussian_offdiagonals_follow_chi() {
        let p = MemoryParams {
            sigma: Some(1.2),
            ..MemoryParams::homogeneous(4, 1.0, 0.8, 0.5)
        };
        let prof = gaussian_lambda_profile(4, 1.2, 0.8);
        let h = magnon_mode_hamiltonian(&p, &prof).unwrap();
        let chi = chi_profile(&prof, 0.8);
        for k in 1..4 {
            assert!((h.get(0, k) - p.g() * chi.chi[k - 1].norm()).abs() < 1e-15);
            assert!(h.get(0, k) > 0.0);
        }
        assert!(magnon_mode_hamiltonian(&p, &prof[..3]).is_err());
    }
}
