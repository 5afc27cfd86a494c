//! Implicit QL iteration for real symmetric tridiagonal matrices.
//!
//! The plane rotations that diagonalize `T` can be applied to any set of row
//! vectors instead of the full eigenvector matrix. Applied to `a^T` they give
//! `a^T Z`, the overlaps `<phi_n|a>`, in `O(n)` work per sweep rather than
//! `O(n^2)`.

use crate::error::{Result, SpinError};

const MAX_SWEEPS: usize = 60;

fn ql_implicit(d: &mut [f64], e: &mut [f64], rows: &mut [Vec<f64>]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(SpinError::Convergence {
                    iterations: iter,
                    residual: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for z in rows.iter_mut() {
                    let f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn check(diag: &[f64], off: &[f64]) -> Result<()> {
    if diag.is_empty() || off.len() + 1 != diag.len() {
        return Err(SpinError::domain(format!(
            "tridiagonal shape mismatch: {} diagonal, {} off-diagonal",
            diag.len(),
            off.len()
        )));
    }
    Ok(())
}

fn sorted(values: Vec<f64>, rows: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let vals = order.iter().map(|&i| values[i]).collect();
    let rows = rows
        .into_iter()
        .map(|r| order.iter().map(|&i| r[i]).collect())
        .collect();
    (vals, rows)
}

/// Eigenvalues (ascending) and the overlaps `<phi_n|v>` of each input vector
/// with every eigenvector.
pub fn tridiagonal_projections(diag: &[f64], off: &[f64], vectors: &[&[f64]]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    check(diag, off)?;
    let n = diag.len();
    if vectors.iter().any(|v| v.len() != n) {
        return Err(SpinError::domain("projection vector length differs from matrix size"));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut rows: Vec<Vec<f64>> = vectors.iter().map(|v| v.to_vec()).collect();
    ql_implicit(&mut d, &mut e, &mut rows)?;
    Ok(sorted(d, rows))
}

/// Eigenvalues (ascending) and eigenvectors; `vectors[n]` is the `n`-th
/// eigenvector.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    check(diag, off)?;
    let n = diag.len();
    // row k of Z accumulates e_k^T Z
    let identity: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut r = vec![0.0; n];
            r[k] = 1.0;
            r
        })
        .collect();
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut rows = identity;
    ql_implicit(&mut d, &mut e, &mut rows)?;
    let (vals, rows) = sorted(d, rows);
    // transpose: rows[k][m] = component k of eigenvector m
    let vecs = (0..n).map(|m| (0..n).map(|k| rows[k][m]).collect()).collect();
    Ok((vals, vecs))
}
