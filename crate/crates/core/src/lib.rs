//! Exact-diagonalization toolkit for spin-chain state transfer, ladder-
//! mediated qubit coupling and magnon-based quantum memory.

pub mod basis;
pub mod dynamics;
pub mod error;
pub mod format;
pub mod ladder_effective;
pub mod matrix;
pub mod memory;
pub mod models;
pub mod spectral;

pub use basis::{binomial, SectorBasis, SpinConfiguration, MAX_SECTOR_STATES};
pub use dynamics::{
    analytic_packet_fidelity, evolve_state, gaussian_packet, packet_transfer_trace, scan_field_scale,
    transfer_fidelity, FidelityTrace, ScanOptions, ScanResult, WavepacketSpec,
};
pub use error::{Result, SpinError};
pub use ladder_effective::{
    exact_spin_gap, jeff_scaling_fit, lieb_ground_spin, perturbative_jeff, reduced_coefficients,
    EffectiveCouplingReport, ReducedStateReport,
};
pub use matrix::HamiltonianMatrix;
pub use memory::{
    analytic_storage_fidelity, chi_profile, decay_rate, dispersion, exact_ring_validation,
    gaussian_lambda_profile, simulate_inhomogeneous, simulate_storage_map, ModeCouplings, StorageReport,
};
pub use models::{Connection, CouplingProfile, FieldProfile, LadderSpec, MemoryParams};
pub use num_complex::Complex64;
pub use spectral::{
    analyze_spectrum, dense_spectrum, evolution_is_mirror, lowest_eigenpairs, Eigendecomposition, SpectrumReport,
    SpmcVerdict,
};
