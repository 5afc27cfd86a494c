//! Ferromagnetic nuclear-spin ring around a central electron spin.
//!
//! Ring sites are `0..N`; the electron occupies site `N`.

use serde::{Deserialize, Serialize};

use crate::basis::SectorBasis;
use crate::error::{Result, SpinError};
use crate::matrix::HamiltonianMatrix;
use crate::models::spin::SpinTerms;

/// Parameters of the magnon memory model.
///
/// `sigma = None` means homogeneous hyperfine couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemoryParams {
    /// Ring size.
    pub n: usize,
    /// Ferromagnetic exchange.
    pub j: f64,
    /// External field.
    #[serde(default)]
    pub b0: f64,
    /// Nuclear Zeeman coefficient `g_n mu_n`.
    #[serde(default)]
    pub gn_mun: f64,
    /// Electron Zeeman coefficient `g* mu_B`.
    #[serde(default)]
    pub ge_mub: f64,
    /// Hyperfine coupling scale.
    pub lambda: f64,
    /// Nuclear spin magnitude.
    #[serde(default = "half")]
    pub s: f64,
    /// Width (in sites) of a Gaussian hyperfine profile.
    #[serde(default)]
    pub sigma: Option<f64>,
}

fn half() -> f64 {
    0.5
}

impl MemoryParams {
    pub fn homogeneous(n: usize, j: f64, lambda: f64, s: f64) -> Self {
        Self {
            n,
            j,
            b0: 0.0,
            gn_mun: 0.0,
            ge_mub: 0.0,
            lambda,
            s,
            sigma: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(SpinError::domain(format!("ring size {} < 2", self.n)));
        }
        if !(self.j > 0.0) {
            return Err(SpinError::domain(format!("exchange J = {} must be > 0", self.j)));
        }
        if !(self.lambda > 0.0) {
            return Err(SpinError::domain(format!("lambda = {} must be > 0", self.lambda)));
        }
        if !(self.s > 0.0) {
            return Err(SpinError::domain(format!("spin s = {} must be > 0", self.s)));
        }
        if let Some(sigma) = self.sigma {
            if !(sigma > 0.0) {
                return Err(SpinError::domain(format!("sigma = {sigma} must be > 0")));
            }
        }
        for (name, v) in [("b0", self.b0), ("gn_mun", self.gn_mun), ("ge_mub", self.ge_mub)] {
            if !v.is_finite() {
                return Err(SpinError::domain(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    /// Storage-mode coupling `g = lambda sqrt(s / 2N)`.
    pub fn g(&self) -> f64 {
        self.lambda * (self.s / (2.0 * self.n as f64)).sqrt()
    }

    /// Electron level splitting `Omega = 2 g* mu_B B0`.
    pub fn omega(&self) -> f64 {
        2.0 * self.ge_mub * self.b0
    }

    /// Frequency of the symmetric magnon, `g_n mu_n B0`.
    pub fn omega_storage(&self) -> f64 {
        self.gn_mun * self.b0
    }

    /// Storage time `T = (pi / lambda) sqrt(N / 2s)`, a half Rabi cycle.
    pub fn storage_time(&self) -> f64 {
        std::f64::consts::PI / self.lambda * (self.n as f64 / (2.0 * self.s)).sqrt()
    }

    /// Hyperfine couplings `lambda_l`, `l = 1..N`.
    pub fn lambda_profile(&self) -> Vec<f64> {
        match self.sigma {
            None => vec![self.lambda; self.n],
            Some(sigma) => crate::memory::gaussian_lambda_profile(self.n, sigma, self.lambda),
        }
    }
}

/// `H_e + H_n + H_en` for spin-1/2 nuclei on a sector of the `N + 1` site
/// register, with per-site hyperfine couplings `lambda_profile`.
pub fn ring_with_central_spin_hamiltonian(
    params: &MemoryParams,
    lambda_profile: &[f64],
    sector: &SectorBasis,
) -> Result<HamiltonianMatrix> {
    params.validate()?;
    let n = params.n;
    if (params.s - 0.5).abs() > 1e-12 {
        return Err(SpinError::domain(format!(
            "the exact ring model holds spin-1/2 nuclei only (s = {})",
            params.s
        )));
    }
    if lambda_profile.len() != n {
        return Err(SpinError::domain(format!(
            "hyperfine profile has {} entries for a ring of {n}",
            lambda_profile.len()
        )));
    }
    if sector.n_sites() != n + 1 {
        return Err(SpinError::domain(format!(
            "ring plus electron has {} sites, sector has {}",
            n + 1,
            sector.n_sites()
        )));
    }
    let electron = n;
    let mut t = SpinTerms::new(n + 1);
    for l in 0..n {
        t.heisenberg(l, (l + 1) % n, -params.j);
        if params.omega_storage() != 0.0 {
            t.field(l, params.omega_storage());
        }
        // (lambda_l / 2N)(sigma^+ S_l^- + h.c.)
        t.exchange(electron, l, 0.0, lambda_profile[l] / n as f64);
    }
    if params.omega() != 0.0 {
        t.field(electron, params.omega());
    }
    t.build(
        sector,
        format!("ring_central_spin(N={n}, J={}, lambda={})", params.j, params.lambda),
    )
}
