//! Lanczos iteration with full reorthogonalization, locking and restarts.
//!
//! Converged Ritz pairs are locked and every further Krylov space is built
//! in their orthogonal complement. Each restart vector carries a small random
//! admixture so that additional copies of degenerate eigenvalues, which a
//! single Krylov space cannot contain, are eventually picked up. Once `count`
//! pairs are locked a final sweep checks that nothing lower was missed and
//! completes a degenerate cluster straddling the cutoff.

use std::ops::Range;

use crate::error::{Result, SpinError};
use crate::matrix::HamiltonianMatrix;
use crate::spectral::{clusters, dense_spectrum, tridiagonal_eigen, DENSE_MAX_DIM};

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Absolute tolerance on `||H y - theta y||`.
    pub tol: f64,
    pub max_krylov: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_krylov: 300,
            max_restarts: 200,
            seed: 0x5eed_1a7c_e5u64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LowestEigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    /// Index ranges of (near-)degenerate clusters within `values`.
    pub clusters: Vec<Range<usize>>,
}

struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }

    fn vector(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next()).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn orthogonalize(v: &mut [f64], against: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in against {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
}

fn residual(h: &HamiltonianMatrix, theta: f64, y: &[f64]) -> f64 {
    let mut hy = vec![0.0; y.len()];
    h.matvec(y, &mut hy);
    axpy(-theta, y, &mut hy);
    norm(&hy)
}

/// The `count` lowest eigenpairs (more when a degenerate cluster straddles
/// the cutoff), ascending.
pub fn lowest_eigenpairs(h: &HamiltonianMatrix, count: usize, tol: f64) -> Result<LowestEigenpairs> {
    lowest_eigenpairs_with(
        h,
        count,
        LanczosOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn lowest_eigenpairs_with(h: &HamiltonianMatrix, count: usize, opts: LanczosOptions) -> Result<LowestEigenpairs> {
    let dim = h.dim();
    if count > dim {
        return Err(SpinError::domain(format!("requested {count} eigenpairs of a {dim}-dimensional operator")));
    }
    let scale = h.norm_bound().max(f64::MIN_POSITIVE);
    let cluster_tol = (1e-9 * scale).max(opts.tol);
    if count == 0 {
        return Ok(LowestEigenpairs {
            values: vec![],
            vectors: vec![],
            residuals: vec![],
            clusters: vec![],
        });
    }

    if 2 * count >= dim && dim <= DENSE_MAX_DIM {
        let eig = dense_spectrum(h)?;
        let mut take = count;
        while take < dim && eig.values[take] - eig.values[take - 1] <= cluster_tol {
            take += 1;
        }
        let vectors: Vec<Vec<f64>> = (0..take).map(|k| eig.vectors.column(k).iter().copied().collect()).collect();
        let values = eig.values[..take].to_vec();
        let residuals = values.iter().zip(&vectors).map(|(&t, y)| residual(h, t, y)).collect();
        let clusters = clusters(&values, cluster_tol);
        return Ok(LowestEigenpairs {
            values,
            vectors,
            residuals,
            clusters,
        });
    }

    let mut rng = SplitMix(opts.seed);
    let mut locked_vals: Vec<f64> = Vec::new();
    let mut locked_vecs: Vec<Vec<f64>> = Vec::new();
    let mut start = rng.vector(dim);
    let mut restarts = 0usize;
    let mut best_residual = f64::INFINITY;
    let kmax = opts.max_krylov.min(dim).max(2);

    'outer: loop {
        if locked_vecs.len() == dim {
            break;
        }
        orthogonalize(&mut start, &locked_vecs);
        let mut nrm = norm(&start);
        while nrm < 1e-8 {
            start = rng.vector(dim);
            orthogonalize(&mut start, &locked_vecs);
            nrm = norm(&start);
        }
        start.iter_mut().for_each(|x| *x /= nrm);

        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut w = vec![0.0; dim];
        let last_beta = loop {
            let j = basis.len() - 1;
            h.matvec(&basis[j], &mut w);
            let alpha = dot(&w, &basis[j]);
            alphas.push(alpha);
            axpy(-alpha, &basis[j], &mut w);
            if j > 0 {
                axpy(-betas[j - 1], &basis[j - 1], &mut w);
            }
            orthogonalize(&mut w, &locked_vecs);
            orthogonalize(&mut w, &basis);
            let beta = norm(&w);
            if beta <= 1e-13 * scale {
                break 0.0;
            }
            if basis.len() == kmax || basis.len() + locked_vecs.len() == dim {
                break beta;
            }
            betas.push(beta);
            basis.push(w.iter().map(|x| x / beta).collect());
        };

        let k = alphas.len();
        let (theta, s) = tridiagonal_eigen(&alphas, &betas)?;
        let ritz_residual: Vec<f64> = (0..k).map(|i| (last_beta * s[i][k - 1]).abs()).collect();
        let ritz_vector = |i: usize| -> Vec<f64> {
            let mut y = vec![0.0; dim];
            for (q, c) in basis.iter().zip(&s[i]) {
                axpy(*c, q, &mut y);
            }
            let n = norm(&y);
            y.iter_mut().for_each(|x| *x /= n);
            y
        };

        let mut newly = 0;
        for i in 0..k {
            if ritz_residual[i] > opts.tol {
                break;
            }
            if locked_vals.len() >= count {
                let mut sorted = locked_vals.clone();
                sorted.sort_by(f64::total_cmp);
                if theta[i] > sorted[count - 1] + cluster_tol {
                    break 'outer;
                }
            }
            let mut y = ritz_vector(i);
            orthogonalize(&mut y, &locked_vecs);
            let n = norm(&y);
            if n < 0.5 {
                // already represented among the locked vectors
                continue;
            }
            y.iter_mut().for_each(|x| *x /= n);
            locked_vals.push(theta[i]);
            locked_vecs.push(y);
            newly += 1;
        }

        if newly == 0 {
            best_residual = best_residual.min(ritz_residual[0]);
            restarts += 1;
            if restarts > opts.max_restarts {
                return Err(SpinError::Convergence {
                    iterations: restarts * kmax,
                    residual: best_residual,
                });
            }
        }
        let needed = count.saturating_sub(locked_vals.len()).max(1);
        let mut next = vec![0.0; dim];
        for i in newly..(newly + needed).min(k) {
            let y = ritz_vector(i);
            axpy(1.0, &y, &mut next);
        }
        let noise = rng.vector(dim);
        let nn = norm(&noise);
        axpy(1e-3 / nn, &noise, &mut next);
        start = next;
    }

    let mut order: Vec<usize> = (0..locked_vals.len()).collect();
    order.sort_by(|&a, &b| locked_vals[a].total_cmp(&locked_vals[b]));
    let mut take = count.min(order.len());
    while take < order.len() && locked_vals[order[take]] - locked_vals[order[take - 1]] <= cluster_tol {
        take += 1;
    }
    let values: Vec<f64> = order[..take].iter().map(|&i| locked_vals[i]).collect();
    let vectors: Vec<Vec<f64>> = order[..take].iter().map(|&i| locked_vecs[i].clone()).collect();
    let residuals = values.iter().zip(&vectors).map(|(&t, y)| residual(h, t, y)).collect();
    let clusters = clusters(&values, cluster_tol);
    Ok(LowestEigenpairs {
        values,
        vectors,
        residuals,
        clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::SectorBasis;
    use crate::models::{ladder_medium_hamiltonian, Connection, LadderSpec, SpinTerms};

    fn heisenberg_chain(n: usize) -> HamiltonianMatrix {
        let sector = SectorBasis::enumerate(n, n / 2).unwrap();
        let mut t = SpinTerms::new(n);
        for i in 0..n - 1 {
            t.heisenberg(i, i + 1, 1.0 + 0.1 * i as f64);
        }
        t.build(&sector, "chain").unwrap()
    }

    #[test]
    fn lowest_four_match_dense() {
        let h = heisenberg_chain(10);
        let dense = dense_spectrum(&h).unwrap();
        let low = lowest_eigenpairs(&h, 4, 1e-10).unwrap();
        for i in 0..4 {
            assert!((low.values[i] - dense.values[i]).abs() < 1e-8);
            assert!(low.residuals[i] < 1e-9);
        }
    }

    #[test]
    fn degenerate_copies_are_found() {
        // two identical decoupled blocks: every level is doubly degenerate
        let block = heisenberg_chain(8).to_dense();
        let n = block.nrows();
        let mut t = Vec::new();
        for r in 0..n {
            for c in 0..n {
                if block[(r, c)] != 0.0 {
                    t.push((r, c, block[(r, c)]));
                    t.push((r + n, c + n, block[(r, c)]));
                }
            }
        }
        let h = HamiltonianMatrix::from_triplets(2 * n, t, "double");
        let dense = dense_spectrum(&h).unwrap();
        let low = lowest_eigenpairs(&h, 3, 1e-10).unwrap();
        // cutoff inside the second pair: the cluster is completed
        assert_eq!(low.values.len(), 4);
        for i in 0..4 {
            assert!((low.values[i] - dense.values[i]).abs() < 1e-8);
        }
        assert_eq!(low.clusters, vec![0..2, 2..4]);
    }

    #[test]
    fn ladder_ground_energy() {
        let spec = LadderSpec::new(4, 1.0, 0.0, Connection::TypeA).unwrap();
        let sector = SectorBasis::enumerate(8, 4).unwrap();
        let h = ladder_medium_hamiltonian(&spec, &sector).unwrap();
        let dense = dense_spectrum(&h).unwrap();
        let low = lowest_eigenpairs(&h, 1, 1e-10).unwrap();
        assert!((low.values[0] - dense.values[0]).abs() < 1e-8);
    }

    #[test]
    fn full_request_falls_back_to_dense() {
        let h = heisenberg_chain(6);
        let low = lowest_eigenpairs(&h, h.dim(), 1e-10).unwrap();
        let dense = dense_spectrum(&h).unwrap();
        assert_eq!(low.values.len(), h.dim());
        for (a, b) in low.values.iter().zip(&dense.values) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(lowest_eigenpairs(&h, h.dim() + 1, 1e-10).is_err());
    }
}
