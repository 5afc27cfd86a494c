//! Magnon memory: a central electron spin stores its state in the symmetric
//! spin wave of a polarized nuclear ring.
//!
//! Two-level states are indexed by excitation number: `0` is the electron
//! down or the mode empty, `1` is the electron up or one magnon.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::basis::SectorBasis;
use crate::dynamics::{evolve_state, FidelityTrace};
use crate::error::{Result, SpinError};
use crate::format::fmt12;
use crate::matrix::HamiltonianMatrix;
use crate::models::{magnon_mode_hamiltonian, ring_with_central_spin_hamiltonian, MemoryParams};
use crate::spectral::dense_spectrum;

pub type DensityMatrix = Matrix2<Complex64>;

/// Largest ring handled by the exact comparison.
pub const EXACT_RING_MAX: usize = 12;

/// `omega_k = g_n mu_n B0 + 2 J s (1 - cos(2 pi k / N))`, `1 <= k <= N`.
pub fn dispersion(params: &MemoryParams, k: usize) -> Result<f64> {
    let n = params.n;
    if k == 0 || k > n {
        return Err(SpinError::domain(format!("mode index {k} outside 1..={n}")));
    }
    let q = 2.0 * PI * k as f64 / n as f64;
    Ok(params.omega_storage() + 2.0 * params.j * params.s * (1.0 - q.cos()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeCouplings {
    /// `chi_k` for `k = 1..N-1`.
    pub chi: Vec<Complex64>,
    pub lambda_profile: Vec<f64>,
    pub sigma: Option<f64>,
}

impl ModeCouplings {
    pub fn n(&self) -> usize {
        self.lambda_profile.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.chi.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// `chi_k = sum_l lambda_l / (lambda N) exp(i 2 pi k l / N)`, `k = 1..N-1`,
/// sites `l = 1..N`.
pub fn chi_profile(lambda_profile: &[f64], lambda: f64) -> ModeCouplings {
    let n = lambda_profile.len();
    let chi = (1..n)
        .map(|k| {
            lambda_profile
                .iter()
                .enumerate()
                .map(|(i, &lam)| {
                    // reduce k l mod N before forming the angle
                    let kl = (k * (i + 1)) % n;
                    Complex64::from_polar(lam / (lambda * n as f64), 2.0 * PI * kl as f64 / n as f64)
                })
                .sum()
        })
        .collect();
    ModeCouplings {
        chi,
        lambda_profile: lambda_profile.to_vec(),
        sigma: None,
    }
}

/// `lambda_l = lambda / (sqrt(2 pi) sigma) exp(-(l - 1)^2 / (2 sigma^2))`.
pub fn gaussian_lambda_profile(n: usize, sigma: f64, lambda: f64) -> Vec<f64> {
    let norm = lambda / ((2.0 * PI).sqrt() * sigma);
    (0..n)
        .map(|l| norm * (-(l as f64).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect()
}

/// Couplings of the profile described by `params`.
pub fn mode_couplings(params: &MemoryParams) -> Result<ModeCouplings> {
    params.validate()?;
    let mut m = chi_profile(&params.lambda_profile(), params.lambda);
    m.sigma = params.sigma;
    Ok(m)
}

/// Mode spacing `|d omega_k / dk|` where the band crosses the resonance
/// `omega = 2g`, or the spacing of the nearest discrete modes outside it.
pub fn default_broadening(params: &MemoryParams) -> Result<f64> {
    params.validate()?;
    let n = params.n as f64;
    let width = 2.0 * params.j * params.s;
    let x = 1.0 - (2.0 * params.g() - params.omega_storage()) / width;
    if x.abs() < 1.0 {
        let spacing = width * (1.0 - x * x).sqrt() * 2.0 * PI / n;
        if spacing > 0.0 {
            return Ok(spacing);
        }
    }
    let target = 2.0 * params.g();
    let mut best = (f64::INFINITY, 0.0);
    for k in 1..params.n.max(2) - 1 {
        let (a, b) = (dispersion(params, k)?, dispersion(params, k + 1)?);
        let d = (0.5 * (a + b) - target).abs();
        if d < best.0 && (b - a).abs() > 0.0 {
            best = (d, (b - a).abs());
        }
    }
    if best.1 > 0.0 {
        Ok(best.1)
    } else {
        Err(SpinError::domain("mode spectrum is flat; give an explicit broadening"))
    }
}

/// Golden-rule rate `gamma = 2 pi sum_k (lambda^2 s |chi_k|^2 / 2N) delta(omega_k - 2g)`
/// with the delta function replaced by a unit-area Lorentzian of half width
/// `broadening`.
pub fn decay_rate(params: &MemoryParams, modes: &ModeCouplings, broadening: f64) -> Result<f64> {
    params.validate()?;
    if !(broadening > 0.0) {
        return Err(SpinError::domain(format!("broadening {broadening} must be > 0")));
    }
    if modes.chi.len() + 1 != params.n {
        return Err(SpinError::domain(format!(
            "{} mode couplings for a ring of {}",
            modes.chi.len(),
            params.n
        )));
    }
    let g2 = params.g().powi(2);
    let resonance = 2.0 * params.g();
    let mut sum = 0.0;
    for (i, c) in modes.chi.iter().enumerate() {
        let x = dispersion(params, i + 1)? - resonance;
        sum += c.norm_sqr() * broadening / (PI * (x * x + broadening * broadening));
    }
    Ok(2.0 * PI * g2 * sum)
}

/// `F(t) = (1 + e^{-gamma t/2})/2 sec(phi) [cos(gt) cos(D t + phi) + sin(gt) sin(D t)]`
/// with `phi = arcsin(gamma/g)` and `D = sqrt(g^2 - gamma^2)`.
pub fn analytic_storage_fidelity(t: f64, gamma: f64, g: f64) -> Result<f64> {
    if !(g > 0.0) {
        return Err(SpinError::domain(format!("coupling g = {g} must be > 0")));
    }
    if !(gamma >= 0.0) {
        return Err(SpinError::domain(format!("decay rate {gamma} must be >= 0")));
    }
    if gamma >= g {
        return Err(SpinError::OutOfRegime { gamma, g });
    }
    let phi = (gamma / g).asin();
    let d = (g * g - gamma * gamma).sqrt();
    let bracket = (g * t).cos() * (d * t + phi).cos() + (g * t).sin() * (d * t).sin();
    Ok(0.5 * (1.0 + (-0.5 * gamma * t).exp()) / phi.cos() * bracket)
}

/// `rho -> U rho U^dagger` for a diagonal `U = diag(1, u)`.
fn phase_conjugate(rho: &DensityMatrix, u: Complex64) -> DensityMatrix {
    Matrix2::new(rho[(0, 0)], rho[(0, 1)] * u.conj(), rho[(1, 0)] * u, rho[(1, 1)])
}

/// Decoding unitary `W = diag(1, e^{i pi/2})`: `W w W^dagger` returns the
/// electron state that was stored.
pub fn decoding_unitary() -> DensityMatrix {
    Matrix2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::i())
}

pub fn decode(w: &DensityMatrix) -> DensityMatrix {
    phase_conjugate(w, Complex64::i())
}

/// Checks `rho` is a Hermitian, unit-trace, positive 2x2 matrix.
pub fn validate_density_matrix(rho: &DensityMatrix) -> Result<()> {
    let herm = (rho - rho.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
    if herm > 1e-12 {
        return Err(SpinError::domain("density matrix is not Hermitian"));
    }
    let tr = rho[(0, 0)].re + rho[(1, 1)].re;
    if (tr - 1.0).abs() > 1e-12 {
        return Err(SpinError::domain(format!("density matrix has trace {tr}")));
    }
    let det = rho[(0, 0)].re * rho[(1, 1)].re - rho[(0, 1)].norm_sqr();
    if rho[(0, 0)].re < -1e-12 || rho[(1, 1)].re < -1e-12 || det < -1e-12 {
        return Err(SpinError::domain("density matrix is not positive"));
    }
    Ok(())
}

/// Fidelity `(tr sqrt(sqrt(a) b sqrt(a)))^2` between two qubit states.
pub fn state_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let tr = (a * b).trace().re;
    let det = |m: &DensityMatrix| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re.max(0.0);
    (tr + 2.0 * (det(a) * det(b)).sqrt()).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StorageReport {
    pub rho_e: [[Complex64; 2]; 2],
    pub w: [[Complex64; 2]; 2],
    pub storage_time: f64,
    /// `max |w_nm - rho_nm e^{i(m-n) pi/2}|`.
    pub residual: f64,
    /// `max |W w W^dagger - rho|`.
    pub decoding_residual: f64,
    /// Fidelity of the decoded state with the input.
    pub fidelity: f64,
}

fn to_array(m: &DensityMatrix) -> [[Complex64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

fn max_diff(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// The ideal map `rho_e -> w` after the storage time `T = (pi/lambda) sqrt(N/2s)`.
///
/// The two electron branches are evolved under the one-excitation block of
/// the homogeneous model; the mode state is read off the components with the
/// electron down, so any amplitude left elsewhere shows up as a trace deficit.
pub fn simulate_storage_map(params: &MemoryParams, rho_e: &DensityMatrix) -> Result<StorageReport> {
    params.validate()?;
    if params.sigma.is_some() {
        return Err(SpinError::domain(
            "the ideal storage map needs homogeneous couplings; use simulate_inhomogeneous",
        ));
    }
    if params.b0 != 0.0 {
        return Err(SpinError::domain("the ideal storage map is defined at B0 = 0"));
    }
    validate_density_matrix(rho_e)?;
    let n = params.n;
    let h = magnon_mode_hamiltonian(params, &params.lambda_profile())?;
    let eig = dense_spectrum(&h)?;
    let t = params.storage_time();
    let mut up = vec![Complex64::new(0.0, 0.0); n + 1];
    up[0] = Complex64::new(1.0, 0.0);
    let up_t = evolve_state(&eig, &up, t)?;
    // |-, vac> is stationary at energy -Omega/2
    let down_phase = Complex64::from_polar(1.0, 0.5 * params.omega() * t);
    // mode amplitudes (vacuum, one storage magnon) of each branch
    let m = [[down_phase, Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), up_t[n]]];
    let w = DensityMatrix::from_fn(|r, c| {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                acc += rho_e[(a, b)] * m[a][r] * m[b][c].conj();
            }
        }
        acc
    });
    let expected = phase_conjugate(rho_e, Complex64::new(0.0, -1.0));
    let decoded = decode(&w);
    Ok(StorageReport {
        rho_e: to_array(rho_e),
        w: to_array(&w),
        storage_time: t,
        residual: max_diff(&w, &expected),
        decoding_residual: max_diff(&decoded, rho_e),
        fidelity: state_fidelity(&decoded, rho_e),
    })
}

/// `|<Psi(t)|Psi'(t)>|` for the electron prepared in `(|+> + |->)/sqrt 2`:
/// `Psi` evolves with the storage mode alone, `Psi'` with every mode coupled
/// through `g |chi_k|`.
pub fn simulate_inhomogeneous(params: &MemoryParams, modes: &ModeCouplings, times: &[f64]) -> Result<FidelityTrace> {
    params.validate()?;
    if modes.n() != params.n {
        return Err(SpinError::domain(format!(
            "mode couplings describe a ring of {}, parameters {}",
            modes.n(),
            params.n
        )));
    }
    let n = params.n;
    let full = magnon_mode_hamiltonian(params, &modes.lambda_profile)?;
    let ideal = {
        let t: Vec<_> = full
            .entries()
            .into_iter()
            .filter(|&(r, c, _)| r == c || r.max(c) == n)
            .collect();
        HamiltonianMatrix::from_triplets(n + 1, t, "storage_mode_only")
    };
    let full_eig = dense_spectrum(&full)?;
    let ideal_eig = dense_spectrum(&ideal)?;
    let mut up = vec![Complex64::new(0.0, 0.0); n + 1];
    up[0] = Complex64::new(1.0, 0.0);
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let a = evolve_state(&full_eig, &up, t)?;
        let b = evolve_state(&ideal_eig, &up, t)?;
        let overlap: Complex64 = b.iter().zip(&a).map(|(x, y)| x.conj() * y).sum();
        values.push((0.5 * (Complex64::new(1.0, 0.0) + overlap)).norm());
    }
    FidelityTrace::new(
        times.to_vec(),
        values,
        format!("{} sigma={:?}", full.model_tag(), modes.sigma),
    )
}

/// `k,omega_k,re_chi,im_chi,abs_chi` for `k = 1..N`; the storage mode
/// `k = N` is listed with `chi = 1`.
pub fn mode_table_csv(params: &MemoryParams, modes: &ModeCouplings) -> Result<String> {
    let mut out = String::from("k,omega_k,re_chi,im_chi,abs_chi\n");
    for k in 1..=params.n {
        let c = if k == params.n {
            Complex64::new(1.0, 0.0)
        } else {
            *modes
                .chi
                .get(k - 1)
                .ok_or_else(|| SpinError::domain("mode couplings shorter than the ring"))?
        };
        out.push_str(&format!(
            "{k},{},{},{},{}\n",
            fmt12(dispersion(params, k)?),
            fmt12(c.re),
            fmt12(c.im),
            fmt12(c.norm())
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingValidation {
    pub n: usize,
    /// Exact one-magnon energies above the polarized ring, ascending.
    pub exact_magnon_energies: Vec<f64>,
    /// `omega_k` sorted ascending.
    pub dispersion: Vec<f64>,
    pub spectrum_max_error: f64,
    /// Probability in the electron-down, symmetric-magnon state at `T`.
    pub storage_probability: f64,
    /// Norm distance between the exact state at `T` and the two-level
    /// prediction.
    pub storage_residual: f64,
    /// Set for `N <= 2`, where the protocol's large-ring picture does not apply.
    pub edge_case: bool,
}

/// Compares the exact ring with the spin-wave picture: the one-magnon
/// spectrum at zero hyperfine coupling against the dispersion, and the
/// storage dynamics of the electron flip against the two-level model.
pub fn exact_ring_validation(params: &MemoryParams) -> Result<RingValidation> {
    params.validate()?;
    let n = params.n;
    if n > EXACT_RING_MAX {
        return Err(SpinError::Capacity {
            what: "ring sites for exact validation",
            requested: n,
            cap: EXACT_RING_MAX,
        });
    }
    let sector = SectorBasis::enumerate(n + 1, 1)?;
    let electron_bit = 1u64 << n;

    // zero coupling, electron down
    let h0 = ring_with_central_spin_hamiltonian(params, &vec![0.0; n], &sector)?;
    let ring_rows: Vec<usize> = (0..sector.len()).filter(|&i| sector.state(i) & electron_bit == 0).collect();
    let sub = nalgebra::DMatrix::from_fn(ring_rows.len(), ring_rows.len(), |r, c| h0.get(ring_rows[r], ring_rows[c]));
    let sub = HamiltonianMatrix::from_dense(sub, "ring_one_magnon")?;
    let polarized = {
        let s0 = SectorBasis::enumerate(n + 1, 0)?;
        ring_with_central_spin_hamiltonian(params, &vec![0.0; n], &s0)?.get(0, 0)
    };
    let exact: Vec<f64> = dense_spectrum(&sub)?.values.iter().map(|e| e - polarized).collect();
    let mut disp: Vec<f64> = (1..=n).map(|k| dispersion(params, k)).collect::<Result<_>>()?;
    disp.sort_by(f64::total_cmp);
    let spectrum_max_error = exact.iter().zip(&disp).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    // storage with the actual profile
    let profile = params.lambda_profile();
    let h = ring_with_central_spin_hamiltonian(params, &profile, &sector)?;
    let eig = dense_spectrum(&h)?;
    let start = sector.index_of(electron_bit).expect("electron-up state in sector");
    let mut psi0 = vec![Complex64::new(0.0, 0.0); sector.len()];
    psi0[start] = Complex64::new(1.0, 0.0);
    let t = params.storage_time();
    let psi = evolve_state(&eig, &psi0, t)?;

    let mut sym = vec![0.0; sector.len()];
    for l in 0..n {
        sym[sector.index_of(1u64 << l).unwrap()] = 1.0 / (n as f64).sqrt();
    }
    let amp_sym: Complex64 = sym.iter().zip(&psi).map(|(s, p)| p * *s).sum();

    // two-level prediction with the exact diagonal energies and coupling
    let mut hs = vec![0.0; sector.len()];
    h.matvec(&sym, &mut hs);
    let e_sym: f64 = sym.iter().zip(&hs).map(|(a, b)| a * b).sum();
    let coupling = hs[start];
    let two = HamiltonianMatrix::from_dense(
        nalgebra::DMatrix::from_row_slice(2, 2, &[h.get(start, start), coupling, coupling, e_sym]),
        "two_level",
    )?;
    let two_eig = dense_spectrum(&two)?;
    let pred = evolve_state(&two_eig, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], t)?;
    let mut predicted = vec![Complex64::new(0.0, 0.0); sector.len()];
    predicted[start] = pred[0];
    for (p, s) in predicted.iter_mut().zip(&sym) {
        *p += pred[1] * *s;
    }
    let storage_residual = psi
        .iter()
        .zip(&predicted)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(RingValidation {
        n,
        exact_magnon_energies: exact,
        dispersion: disp,
        spectrum_max_error,
        storage_probability: amp_sym.norm_sqr(),
        storage_residual,
        edge_case: n <= 2,
    })
}
