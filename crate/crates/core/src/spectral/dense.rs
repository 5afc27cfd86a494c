use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Result, SpinError};
use crate::matrix::HamiltonianMatrix;

/// Largest dimension handed to the dense solver.
pub const DENSE_MAX_DIM: usize = 4096;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as columns.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigendecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Builds from unsorted eigenpairs, sorting ascending.
    pub fn from_unsorted(values: Vec<f64>, vectors: DMatrix<f64>) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let sorted_vals = order.iter().map(|&i| values[i]).collect();
        let sorted_vecs = DMatrix::from_fn(vectors.nrows(), order.len(), |r, c| vectors[(r, order[c])]);
        Self {
            values: sorted_vals,
            vectors: sorted_vecs,
        }
    }

    /// Coefficients `<phi_n|v>` of a real vector in the eigenbasis.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|n| self.vectors.column(n).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest `||H phi - eps phi||` over all pairs.
    pub fn max_residual(&self, h: &HamiltonianMatrix) -> f64 {
        let n = self.dim();
        let mut y = vec![0.0; n];
        (0..n)
            .map(|k| {
                let x: Vec<f64> = self.vectors.column(k).iter().copied().collect();
                h.matvec(&x, &mut y);
                y.iter()
                    .zip(&x)
                    .map(|(a, b)| (a - self.values[k] * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Full eigendecomposition through Householder tridiagonalization and
/// implicit QR (nalgebra).
pub fn dense_spectrum(h: &HamiltonianMatrix) -> Result<Eigendecomposition> {
    let n = h.dim();
    if n > DENSE_MAX_DIM {
        return Err(SpinError::Capacity {
            what: "dense eigensolver dimension",
            requested: n,
            cap: DENSE_MAX_DIM,
        });
    }
    if n == 0 {
        return Ok(Eigendecomposition {
            values: vec![],
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::new(h.to_dense());
    Ok(Eigendecomposition::from_unsorted(
        eig.eigenvalues.iter().copied().collect(),
        eig.eigenvectors,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{engineered_couplings, xy_chain_single_excitation};

    #[test]
    fn pauli_x() {
        let h = HamiltonianMatrix::tridiagonal(&[0.0, 0.0], &[1.0], "x");
        let e = dense_spectrum(&h).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn engineered_chain_is_odd_integers() {
        let h = xy_chain_single_excitation(&engineered_couplings(6, 0).unwrap());
        let e = dense_spectrum(&h).unwrap();
        for (v, want) in e.values.iter().zip([-5.0, -3.0, -1.0, 1.0, 3.0, 5.0]) {
            assert!((v - want).abs() < 1e-12, "{v} vs {want}");
        }
        assert!(e.max_residual(&h) < 1e-10 * h.norm_bound());
        let gram = e.vectors.transpose() * &e.vectors;
        assert!((gram - DMatrix::identity(6, 6)).amax() < 1e-10);
    }

    #[test]
    fn cap_enforced() {
        let h = HamiltonianMatrix::tridiagonal(&vec![0.0; DENSE_MAX_DIM + 1], &vec![1.0; DENSE_MAX_DIM], "big");
        assert!(matches!(dense_spectrum(&h), Err(SpinError::Capacity { .. })));
    }
}
