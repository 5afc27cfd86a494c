//! Hamiltonian builders for the chain, ladder and ring models.

mod chain;
mod ladder;
mod magnon;
mod ring;
mod spin;

pub use chain::{
    engineered_couplings, parabolic_chain_single_excitation, xy_chain_single_excitation,
    CouplingProfile, FieldProfile,
};
pub use ladder::{heisenberg_ladder_hamiltonian, ladder_medium_hamiltonian, Connection, LadderSpec};
pub use magnon::magnon_mode_hamiltonian;
pub use ring::{ring_with_central_spin_hamiltonian, MemoryParams};
pub use spin::{total_spin_squared, SpinTerms};
