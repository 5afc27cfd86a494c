//! Two-leg Heisenberg ladder with two probe qubits attached at its ends.
//!
//! Ladder site `(leg, rung)` has index `2 * rung + leg`; qubit A sits at
//! `2N` and qubit B at `2N + 1`.

use serde::{Deserialize, Serialize};

use crate::basis::SectorBasis;
use crate::error::{Result, SpinError};
use crate::matrix::HamiltonianMatrix;
use crate::models::spin::SpinTerms;

/// How qubits A and B attach to the ladder.
///
/// `TypeA` attaches both to the same leg at opposite ends; `TypeB` to
/// diagonally opposite corners. For a single plaquette (`N = 2`) these are
/// the `Adjacent` and `Diagonal` attachments, which are accepted only there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connection {
    TypeA,
    TypeB,
    Adjacent,
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSpec {
    pub n_rungs: usize,
    pub j: f64,
    pub j0: f64,
    pub connection: Connection,
}

impl LadderSpec {
    pub fn new(n_rungs: usize, j: f64, j0: f64, connection: Connection) -> Result<Self> {
        let spec = Self {
            n_rungs,
            j,
            j0,
            connection,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rungs == 0 {
            return Err(SpinError::domain("ladder needs at least one rung"));
        }
        if !(self.j > 0.0) {
            return Err(SpinError::domain(format!("ladder exchange J = {} must be > 0", self.j)));
        }
        if !(self.j0 >= 0.0) {
            return Err(SpinError::domain(format!("qubit exchange J0 = {} must be >= 0", self.j0)));
        }
        if matches!(self.connection, Connection::Adjacent | Connection::Diagonal) && self.n_rungs != 2 {
            return Err(SpinError::domain(
                "adjacent/diagonal attachments are defined for the N = 2 plaquette only",
            ));
        }
        Ok(())
    }

    /// Distance between the qubits, `L = N + 1`.
    pub fn distance(&self) -> usize {
        self.n_rungs + 1
    }

    pub fn ladder_sites(&self) -> usize {
        2 * self.n_rungs
    }

    pub fn total_sites(&self) -> usize {
        2 * self.n_rungs + 2
    }

    pub fn qubit_a(&self) -> usize {
        2 * self.n_rungs
    }

    pub fn qubit_b(&self) -> usize {
        2 * self.n_rungs + 1
    }

    /// Ladder sites `(L, R)` that qubits A and B couple to.
    pub fn attachment(&self) -> (usize, usize) {
        let last = self.n_rungs - 1;
        match self.connection {
            Connection::TypeA | Connection::Adjacent => (0, 2 * last),
            Connection::TypeB | Connection::Diagonal => (0, 2 * last + 1),
        }
    }

    /// Bipartite sublattice (0 or 1) of every site, qubits included.
    pub fn sublattices(&self) -> Vec<u8> {
        let mut sub: Vec<u8> = (0..self.ladder_sites())
            .map(|s| ((s % 2 + s / 2) % 2) as u8)
            .collect();
        let (l, r) = self.attachment();
        sub.push(1 - sub[l]);
        sub.push(1 - sub[r]);
        sub
    }

    /// Ground-state spin from the sublattice imbalance of the bipartite
    /// graph (valid for `J0 > 0`).
    pub fn predicted_ground_spin(&self) -> usize {
        let sub = self.sublattices();
        let ones = sub.iter().filter(|&&s| s == 1).count();
        let zeros = sub.len() - ones;
        ones.abs_diff(zeros) / 2
    }

    fn medium_terms(&self, n_sites: usize) -> SpinTerms {
        let mut t = SpinTerms::new(n_sites);
        for r in 0..self.n_rungs {
            t.heisenberg(2 * r, 2 * r + 1, self.j);
            if r + 1 < self.n_rungs {
                t.heisenberg(2 * r, 2 * r + 2, self.j);
                t.heisenberg(2 * r + 1, 2 * r + 3, self.j);
            }
        }
        t
    }

    /// Ladder plus the two qubit couplings.
    pub fn full_terms(&self) -> SpinTerms {
        let mut t = self.medium_terms(self.total_sites());
        if self.j0 != 0.0 {
            let (l, r) = self.attachment();
            t.heisenberg(self.qubit_a(), l, self.j0);
            t.heisenberg(self.qubit_b(), r, self.j0);
        }
        t
    }

    /// Ladder alone, on its `2N` sites.
    pub fn medium_only_terms(&self) -> SpinTerms {
        self.medium_terms(self.ladder_sites())
    }
}

/// Full `H_M + H_q` on a sector of the `2N + 2` site register.
pub fn heisenberg_ladder_hamiltonian(spec: &LadderSpec, sector: &SectorBasis) -> Result<HamiltonianMatrix> {
    spec.validate()?;
    if sector.n_sites() != spec.total_sites() {
        return Err(SpinError::domain(format!(
            "ladder with qubits has {} sites, sector has {}",
            spec.total_sites(),
            sector.n_sites()
        )));
    }
    spec.full_terms().build(
        sector,
        format!(
            "ladder(N={}, J={}, J0={}, {:?})",
            spec.n_rungs, spec.j, spec.j0, spec.connection
        ),
    )
}

/// Bare ladder `H_M` on a sector of its `2N` sites.
pub fn ladder_medium_hamiltonian(spec: &LadderSpec, sector: &SectorBasis) -> Result<HamiltonianMatrix> {
    spec.validate()?;
    if sector.n_sites() != spec.ladder_sites() {
        return Err(SpinError::domain(format!(
            "bare ladder has {} sites, sector has {}",
            spec.ladder_sites(),
            sector.n_sites()
        )));
    }
    spec.medium_only_terms()
        .build(sector, format!("ladder_medium(N={}, J={})", spec.n_rungs, spec.j))
}
