//! Real symmetric operators in dense or compressed-row storage.

use nalgebra::DMatrix;

use crate::error::{Result, SpinError};

/// Matrices at or below this dimension are stored densely.
pub const DENSE_STORAGE_MAX_DIM: usize = 64;

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Assembles from `(row, col, value)` triplets; duplicates are summed and
    /// explicit zeros dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut m = Self {
            dim,
            row_ptr,
            cols,
            vals,
        };
        m.drop_zeros();
        m
    }

    fn drop_zeros(&mut self) {
        if self.vals.iter().all(|v| *v != 0.0) {
            return;
        }
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.vals[k] != 0.0 {
                    cols.push(self.cols[k]);
                    vals.push(self.vals[k]);
                }
            }
            row_ptr[r + 1] = cols.len();
        }
        self.row_ptr = row_ptr;
        self.cols = cols;
        self.vals = vals;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    Dense(DMatrix<f64>),
    Sparse(CsrMatrix),
}

/// A real symmetric Hamiltonian together with a short description of the
/// model it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    storage: Storage,
    model_tag: String,
}

impl HamiltonianMatrix {
    /// Builds from triplets, choosing dense storage for small dimensions.
    pub fn from_triplets(
        dim: usize,
        triplets: Vec<(usize, usize, f64)>,
        model_tag: impl Into<String>,
    ) -> Self {
        let storage = if dim <= DENSE_STORAGE_MAX_DIM {
            let mut m = DMatrix::zeros(dim, dim);
            for (r, c, v) in triplets {
                m[(r, c)] += v;
            }
            Storage::Dense(m)
        } else {
            Storage::Sparse(CsrMatrix::from_triplets(dim, triplets))
        };
        Self {
            storage,
            model_tag: model_tag.into(),
        }
    }

    /// Wraps a dense matrix, rejecting it when not symmetric.
    pub fn from_dense(m: DMatrix<f64>, model_tag: impl Into<String>) -> Result<Self> {
        if !m.is_square() {
            return Err(SpinError::domain("Hamiltonian must be square"));
        }
        let h = Self {
            storage: Storage::Dense(m),
            model_tag: model_tag.into(),
        };
        if !h.is_symmetric(1e-12) {
            return Err(SpinError::domain("Hamiltonian is not symmetric"));
        }
        Ok(h)
    }

    /// Symmetric tridiagonal matrix from its diagonal and first off-diagonal.
    pub fn tridiagonal(diag: &[f64], off: &[f64], model_tag: impl Into<String>) -> Self {
        debug_assert_eq!(off.len() + 1, diag.len().max(1));
        let n = diag.len();
        let mut t = Vec::with_capacity(3 * n);
        for (i, &d) in diag.iter().enumerate() {
            t.push((i, i, d));
        }
        for (i, &o) in off.iter().enumerate() {
            t.push((i, i + 1, o));
            t.push((i + 1, i, o));
        }
        Self::from_triplets(n, t, model_tag)
    }

    pub fn dim(&self) -> usize {
        match &self.storage {
            Storage::Dense(m) => m.nrows(),
            Storage::Sparse(m) => m.dim(),
        }
    }

    pub fn model_tag(&self) -> &str {
        &self.model_tag
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m[(r, c)],
            Storage::Sparse(m) => m.get(r, c),
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        match &self.storage {
            Storage::Dense(m) => {
                let n = m.nrows();
                y.iter_mut().for_each(|v| *v = 0.0);
                // column-major traversal
                for c in 0..n {
                    let xc = x[c];
                    if xc == 0.0 {
                        continue;
                    }
                    for (r, out) in y.iter_mut().enumerate() {
                        *out += m[(r, c)] * xc;
                    }
                }
            }
            Storage::Sparse(m) => m.matvec(x, y),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(m) => m.to_dense(),
        }
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        match &self.storage {
            Storage::Dense(m) => {
                let n = m.nrows();
                let mut out = Vec::new();
                for r in 0..n {
                    for c in 0..n {
                        let v = m[(r, c)];
                        if v != 0.0 {
                            out.push((r, c, v));
                        }
                    }
                }
                out
            }
            Storage::Sparse(m) => (0..m.dim())
                .flat_map(|r| m.row(r).map(move |(c, v)| (r, c, v)))
                .collect(),
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries()
            .iter()
            .fold(0.0f64, |acc, &(_, _, v)| acc.max(v.abs()))
    }

    /// Cheap upper bound on the spectral norm (max absolute row sum).
    pub fn norm_bound(&self) -> f64 {
        let n = self.dim();
        let mut rows = vec![0.0f64; n];
        for (r, _, v) in self.entries() {
            rows[r] += v.abs();
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Symmetry to a tolerance relative to the largest entry.
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        self.entries()
            .iter()
            .all(|&(r, c, v)| (v - self.get(c, r)).abs() <= rel_tol * scale)
    }

    /// Checks that the operator commutes with the permutation matrix of
    /// `perm` (i.e. `H[p(i), p(j)] = H[i, j]`).
    pub fn commutes_with_permutation(&self, perm: &[usize], rel_tol: f64) -> bool {
        if perm.len() != self.dim() {
            return false;
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        self.entries()
            .iter()
            .all(|&(r, c, v)| (v - self.get(perm[r], perm[c])).abs() <= rel_tol * scale)
    }

    /// Diagonal and first off-diagonal when the matrix is tridiagonal.
    pub fn as_tridiagonal(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let n = self.dim();
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n.saturating_sub(1)];
        let mut lower = vec![0.0; n.saturating_sub(1)];
        for (r, c, v) in self.entries() {
            if r == c {
                diag[r] = v;
            } else if c == r + 1 {
                upper[r] = v;
            } else if r == c + 1 {
                lower[c] = v;
            } else {
                return None;
            }
        }
        (upper == lower).then_some((diag, upper))
    }
}
