//! Parity classification against a mirror permutation and the
//! spectrum-parity matching test.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Result, SpinError};
use crate::matrix::HamiltonianMatrix;
use crate::spectral::{clusters, dense_spectrum, Eigendecomposition};

/// Relative tolerance on `[H, P] = 0`.
const COMMUTATION_TOL: f64 = 1e-10;
/// Cluster threshold relative to the spectral span.
const CLUSTER_REL_TOL: f64 = 1e-9;
/// Commensuration tolerance relative to the spectral span.
const GCD_REL_TOL: f64 = 1e-6;
/// Largest divisor tried when searching for the base quantum.
const MAX_GCD_DIVISOR: usize = 32;
const PARITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn sign(self) -> Option<i8> {
        match self {
            Parity::Even => Some(1),
            Parity::Odd => Some(-1),
            Parity::Mixed => None,
        }
    }
}

impl Serialize for Parity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.sign() {
            Some(p) => s.serialize_i8(p),
            None => s.serialize_str("mixed"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpmcVerdict {
    Holds,
    Fails,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    pub parities: Vec<Parity>,
    #[serde(rename = "E0")]
    pub e0: Option<f64>,
    pub integer_labels: Option<Vec<u64>>,
    pub spmc_verdict: SpmcVerdict,
    /// Largest parity or commensuration residual.
    pub residual: f64,
}

fn apply_permutation(perm: &[usize], x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    for (i, &p) in perm.iter().enumerate() {
        y[p] = x[i];
    }
    y
}

fn validate_permutation(perm: &[usize], dim: usize) -> Result<()> {
    if perm.len() != dim {
        return Err(SpinError::domain(format!(
            "mirror permutation has length {}, operator has dimension {dim}",
            perm.len()
        )));
    }
    let mut seen = vec![false; dim];
    for &p in perm {
        if p >= dim || std::mem::replace(&mut seen[p], true) {
            return Err(SpinError::domain("mirror map is not a permutation"));
        }
    }
    Ok(())
}

/// Smallest `E0` (largest divisor `q` of the smallest gap) such that every
/// offset `d` is an integer multiple of `E0` within `tol`. Offsets must be
/// non-negative and ascending.
pub fn infer_base_quantum(offsets: &[f64], tol: f64) -> Option<f64> {
    let gaps: Vec<f64> = offsets.windows(2).map(|w| w[1] - w[0]).filter(|g| *g > tol).collect();
    let smallest = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    if !smallest.is_finite() {
        return None;
    }
    (1..=MAX_GCD_DIVISOR).map(|q| smallest / q as f64).find(|&e0| {
        e0 > 2.0 * tol && offsets.iter().all(|&d| (d - (d / e0).round() * e0).abs() <= tol)
    })
}

/// Eigenvectors re-rotated inside each degenerate cluster so that they are
/// also eigenvectors of the mirror, plus their parities.
fn resolve_parities(eig: &Eigendecomposition, perm: &[usize], cluster_tol: f64) -> (DMatrix<f64>, Vec<Parity>, f64) {
    let n = eig.dim();
    let mut vectors = eig.vectors.clone();
    let mut parities = vec![Parity::Mixed; n];
    let mut residual = 0.0f64;
    for range in clusters(&eig.values, cluster_tol) {
        let c = range.len();
        let cols: Vec<Vec<f64>> = range.clone().map(|k| eig.vectors.column(k).iter().copied().collect()).collect();
        let pcols: Vec<Vec<f64>> = cols.iter().map(|v| apply_permutation(perm, v)).collect();
        let restricted = DMatrix::from_fn(c, c, |a, b| cols[a].iter().zip(&pcols[b]).map(|(x, y)| x * y).sum());
        let sym = (&restricted + restricted.transpose()) * 0.5;
        let local = SymmetricEigen::new(sym);
        for m in 0..c {
            let mut v = vec![0.0; n];
            for (a, col) in cols.iter().enumerate() {
                let w = local.eigenvectors[(a, m)];
                v.iter_mut().zip(col).for_each(|(x, y)| *x += w * y);
            }
            let p = local.eigenvalues[m];
            let parity = if (p - 1.0).abs() < PARITY_TOL {
                Parity::Even
            } else if (p + 1.0).abs() < PARITY_TOL {
                Parity::Odd
            } else {
                Parity::Mixed
            };
            if let Some(s) = parity.sign() {
                let pv = apply_permutation(perm, &v);
                let r = pv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - s as f64 * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                residual = residual.max(r);
            }
            let k = range.start + m;
            parities[k] = parity;
            vectors.column_mut(k).iter_mut().zip(&v).for_each(|(x, y)| *x = *y);
        }
    }
    (vectors, parities, residual)
}

/// Eigenvalues, mirror parities, base quantum and the matching verdict.
///
/// A Hamiltonian that does not commute with the mirror gets the verdict
/// `NotApplicable` rather than an error.
pub fn analyze_spectrum(h: &HamiltonianMatrix, mirror: &[usize]) -> Result<SpectrumReport> {
    validate_permutation(mirror, h.dim())?;
    let eig = dense_spectrum(h)?;
    let n = eig.dim();
    if !h.commutes_with_permutation(mirror, COMMUTATION_TOL) {
        return Ok(SpectrumReport {
            eigenvalues: eig.values,
            parities: vec![Parity::Mixed; n],
            e0: None,
            integer_labels: None,
            spmc_verdict: SpmcVerdict::NotApplicable,
            residual: 0.0,
        });
    }
    let span = if n > 0 { eig.values[n - 1] - eig.values[0] } else { 0.0 };
    let scale = if span > 0.0 { span } else { 1.0 };
    let (_, parities, parity_residual) = resolve_parities(&eig, mirror, CLUSTER_REL_TOL * scale);

    let offsets: Vec<f64> = eig.values.iter().map(|e| e - eig.values[0]).collect();
    let tol = GCD_REL_TOL * scale;
    let e0 = infer_base_quantum(&offsets, tol);
    let Some(e0) = e0 else {
        return Ok(SpectrumReport {
            eigenvalues: eig.values,
            parities,
            e0: None,
            integer_labels: None,
            spmc_verdict: if n > 1 { SpmcVerdict::Fails } else { SpmcVerdict::NotApplicable },
            residual: parity_residual,
        });
    };
    let labels: Vec<u64> = offsets.iter().map(|d| (d / e0).round() as u64).collect();
    let commensuration = offsets
        .iter()
        .zip(&labels)
        .map(|(d, &l)| (d - l as f64 * e0).abs())
        .fold(0.0, f64::max);

    // p_n (-1)^{N_n} must be one global sign
    let signs: Option<Vec<i8>> = parities
        .iter()
        .zip(&labels)
        .map(|(p, &l)| p.sign().map(|s| if l % 2 == 0 { s } else { -s }))
        .collect();
    let holds = signs.is_some_and(|s| s.iter().all(|&x| x == s[0]));
    Ok(SpectrumReport {
        eigenvalues: eig.values,
        parities,
        e0: Some(e0),
        integer_labels: Some(labels),
        spmc_verdict: if holds { SpmcVerdict::Holds } else { SpmcVerdict::Fails },
        residual: parity_residual.max(commensuration),
    })
}

/// Operator-norm distance between `exp(-i H pi / E0)`, with the phase of the
/// lowest level removed, and the closer of `+P` and `-P`.
pub fn evolution_is_mirror(h: &HamiltonianMatrix, e0: f64, mirror: &[usize]) -> Result<f64> {
    if !(e0 > 0.0) {
        return Err(SpinError::domain(format!("base quantum E0 = {e0} must be positive")));
    }
    validate_permutation(mirror, h.dim())?;
    let eig = dense_spectrum(h)?;
    let n = eig.dim();
    if n == 0 {
        return Ok(0.0);
    }
    let eps_min = eig.values[0];
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|e| Complex64::from_polar(1.0, -std::f64::consts::PI * (e - eps_min) / e0))
        .collect();
    let v = &eig.vectors;
    let scaled = DMatrix::from_fn(n, n, |r, k| phases[k] * v[(r, k)]);
    let vc = v.map(|x| Complex64::new(x, 0.0));
    let u = scaled * vc.transpose();
    let mut best = f64::INFINITY;
    for sign in [1.0, -1.0] {
        let mut d = u.clone();
        for (i, &p) in mirror.iter().enumerate() {
            d[(p, i)] -= Complex64::new(sign, 0.0);
        }
        let norm = d.singular_values().iter().copied().fold(0.0, f64::max);
        best = best.min(norm);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{engineered_couplings, parabolic_chain_single_excitation, xy_chain_single_excitation, FieldProfile};

    fn reversal(n: usize) -> Vec<usize> {
        (0..n).rev().collect()
    }

    fn engineered(n: usize, k: usize) -> HamiltonianMatrix {
        xy_chain_single_excitation(&engineered_couplings(n, k).unwrap())
    }

    #[test]
    fn engineered_4_0() {
        let r = analyze_spectrum(&engineered(4, 0), &reversal(4)).unwrap();
        for (a, b) in r.eigenvalues.iter().zip([-3.0, -1.0, 1.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((r.e0.unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(r.integer_labels.as_deref(), Some(&[0, 1, 2, 3][..]));
        assert_eq!(r.spmc_verdict, SpmcVerdict::Holds);
        for w in r.parities.windows(2) {
            assert_ne!(w[0], w[1]);
        }
    }

    #[test]
    fn engineered_4_1() {
        let r = analyze_spectrum(&engineered(4, 1), &reversal(4)).unwrap();
        for (a, b) in r.eigenvalues.iter().zip([-5.0, -3.0, 3.0, 5.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((r.e0.unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(r.integer_labels.as_deref(), Some(&[0, 1, 4, 5][..]));
        assert_eq!(r.spmc_verdict, SpmcVerdict::Holds);
    }

    #[test]
    fn asymmetric_is_not_applicable() {
        let h = HamiltonianMatrix::tridiagonal(&[0.3, -0.1, 0.7, 0.2], &[1.0, 0.4, 0.9], "random");
        let r = analyze_spectrum(&h, &reversal(4)).unwrap();
        assert_eq!(r.spmc_verdict, SpmcVerdict::NotApplicable);
        assert!(r.e0.is_none());
    }

    #[test]
    fn engineered_evolution_mirrors() {
        for k in 0..3 {
            let h = engineered(6, k);
            assert!(evolution_is_mirror(&h, 2.0, &reversal(6)).unwrap() < 1e-8);
        }
    }

    #[test]
    fn parabolic_chain_is_only_approximate() {
        let field = FieldProfile::parabolic(501, 1e-4).unwrap();
        let h = parabolic_chain_single_excitation(501, 1.0, &field).unwrap();
        let r = analyze_spectrum(&h, &reversal(501)).unwrap();
        assert_ne!(r.spmc_verdict, SpmcVerdict::Holds);
        let e0 = r.eigenvalues[1] - r.eigenvalues[0];
        let dev = evolution_is_mirror(&h, e0, &reversal(501)).unwrap();
        assert!(dev > 0.1, "deviation {dev}");
    }

    #[test]
    fn degenerate_cluster_parities_resolved() {
        // two disconnected mirror-image dimers: each level twofold degenerate
        // with one even and one odd combination
        let mut t = Vec::new();
        for (a, b) in [(0, 1), (2, 3)] {
            t.push((a, b, 1.0));
            t.push((b, a, 1.0));
        }
        let h = HamiltonianMatrix::from_triplets(4, t, "dimers");
        let perm = vec![3, 2, 1, 0];
        let r = analyze_spectrum(&h, &perm).unwrap();
        assert!(r.parities.iter().all(|p| *p != Parity::Mixed));
        assert!(r.residual < 1e-10);
        assert_eq!(r.spmc_verdict, SpmcVerdict::Fails);
    }

    #[test]
    fn base_quantum_from_offsets() {
        assert!((infer_base_quantum(&[0.0, 2.0, 8.0, 10.0], 1e-6).unwrap() - 2.0).abs() < 1e-12);
        assert!((infer_base_quantum(&[0.0, 4.0, 6.0], 1e-6).unwrap() - 2.0).abs() < 1e-12);
        assert!(infer_base_quantum(&[0.0, 1.0, std::f64::consts::SQRT_2], 1e-6).is_none());
        assert!(infer_base_quantum(&[0.0], 1e-6).is_none());
    }

    #[test]
    fn report_serializes() {
        let r = analyze_spectrum(&engineered(4, 0), &reversal(4)).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["spmc_verdict"], "holds");
        assert_eq!(json["parities"].as_array().unwrap().len(), 4);
        assert!(json["E0"].is_number());
    }
}
