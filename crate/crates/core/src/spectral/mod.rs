//! Eigen-analysis of model Hamiltonians.

mod dense;
mod lanczos;
mod mirror;
mod tridiagonal;

pub use dense::{dense_spectrum, Eigendecomposition, DENSE_MAX_DIM};
pub use lanczos::{lowest_eigenpairs, LanczosOptions, LowestEigenpairs};
pub use mirror::{analyze_spectrum, evolution_is_mirror, infer_base_quantum, Parity, SpectrumReport, SpmcVerdict};
pub use tridiagonal::{tridiagonal_eigen, tridiagonal_projections};

/// Groups ascending values into runs whose consecutive members differ by at
/// most `tol`. Returns index ranges.
pub fn clusters(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            if i > start {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}
