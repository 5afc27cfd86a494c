//! Shared fixtures for the benchmarks.

use spinbus_core::models::SpinTerms;
use spinbus_core::{HamiltonianMatrix, SectorBasis};

/// Open Heisenberg chain of `n` sites in its `Sz = 0` sector.
pub fn heisenberg_chain(n: usize) -> HamiltonianMatrix {
    let mut t = SpinTerms::new(n);
    for i in 0..n - 1 {
        t.heisenberg(i, i + 1, 1.0);
    }
    let sector = SectorBasis::enumerate(n, n / 2).expect("sector within cap");
    t.build(&sector, "heisenberg chain").expect("valid terms")
}
