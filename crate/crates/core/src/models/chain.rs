use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};
use crate::matrix::HamiltonianMatrix;

/// Nearest-neighbour couplings `J_1 .. J_{N-1}` of an `N`-site XY chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingProfile {
    pub n: usize,
    pub k: usize,
    pub couplings: Vec<f64>,
}

impl CouplingProfile {
    pub fn is_mirror_symmetric(&self) -> bool {
        let c = &self.couplings;
        (0..c.len()).all(|i| c[i] == c[c.len() - 1 - i])
    }
}

/// Engineered couplings of family `k`: `sqrt(i (N - i))` on even bonds and
/// `sqrt((i + 2k)(N - i + 2k))` on odd bonds (bonds numbered from 1).
///
/// For odd `N` the two branches swap under reflection, so only `k = 0` keeps
/// the chain mirror symmetric and other families are rejected.
pub fn engineered_couplings(n: usize, k: usize) -> Result<CouplingProfile> {
    if n < 2 {
        return Err(SpinError::domain(format!("chain length {n} < 2")));
    }
    if n % 2 == 1 && k > 0 {
        return Err(SpinError::domain(format!(
            "family k = {k} is not mirror symmetric on an odd chain (N = {n})"
        )));
    }
    let (nf, kf) = (n as f64, k as f64);
    let couplings = (1..n)
        .map(|i| {
            let i = i as f64;
            if i as usize % 2 == 0 {
                (i * (nf - i)).sqrt()
            } else {
                ((i + 2.0 * kf) * (nf - i + 2.0 * kf)).sqrt()
            }
        })
        .collect();
    Ok(CouplingProfile { n, k, couplings })
}

/// One-excitation block of the XY chain: hopping `J_i` between sites `i`
/// and `i + 1`, zero on-site energy.
pub fn xy_chain_single_excitation(profile: &CouplingProfile) -> HamiltonianMatrix {
    let diag = vec![0.0; profile.couplings.len() + 1];
    HamiltonianMatrix::tridiagonal(
        &diag,
        &profile.couplings,
        format!("xy_chain(N={}, k={})", profile.n, profile.k),
    )
}

/// Parabolic field `B(i) = 2 B0 (i - N - 1)^2` on a `2N + 1` site chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldProfile {
    pub n_sites: usize,
    pub b0: f64,
    pub values: Vec<f64>,
}

impl FieldProfile {
    pub fn parabolic(n_sites: usize, b0: f64) -> Result<Self> {
        if n_sites % 2 == 0 || n_sites < 3 {
            return Err(SpinError::domain(format!(
                "parabolic chain needs an odd length >= 3, got {n_sites}"
            )));
        }
        let half = (n_sites - 1) / 2;
        let values = (1..=n_sites)
            .map(|i| {
                let d = i as f64 - half as f64 - 1.0;
                2.0 * b0 * d * d
            })
            .collect();
        Ok(Self {
            n_sites,
            b0,
            values,
        })
    }

    /// `N` in the `2N + 1` labelling.
    pub fn half_length(&self) -> usize {
        (self.n_sites - 1) / 2
    }
}

/// One-excitation block of the ferromagnetic chain in a site-dependent
/// field: hopping `-J/2`, on-site energy `B(i)/2`.
pub fn parabolic_chain_single_excitation(
    n_sites: usize,
    j: f64,
    field: &FieldProfile,
) -> Result<HamiltonianMatrix> {
    if field.n_sites != n_sites || field.values.len() != n_sites {
        return Err(SpinError::domain(format!(
            "field profile covers {} sites, chain has {n_sites}",
            field.n_sites
        )));
    }
    if !(j > 0.0) {
        return Err(SpinError::domain(format!("exchange J = {j} must be positive")));
    }
    let diag: Vec<f64> = field.values.iter().map(|b| 0.5 * b).collect();
    let off = vec![-0.5 * j; n_sites - 1];
    Ok(HamiltonianMatrix::tridiagonal(
        &diag,
        &off,
        format!("parabolic_chain(sites={n_sites}, J={j}, B0={})", field.b0),
    ))
}
