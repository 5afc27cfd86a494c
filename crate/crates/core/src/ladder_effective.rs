//! Effective exchange between two qubits coupled through a spin ladder.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::SectorBasis;
use crate::error::{Result, SpinError};
use crate::format::fmt12;
use crate::models::{heisenberg_ladder_hamiltonian, ladder_medium_hamiltonian, total_spin_squared, Connection, LadderSpec};
use crate::spectral::{dense_spectrum, lowest_eigenpairs, LowestEigenpairs};

/// Largest bare ladder handled by the perturbative sum (full dense spectrum).
pub const PERTURBATIVE_MAX_LADDER_SITES: usize = 14;
/// Largest ladder-plus-qubits register for the exact gap.
pub const EXACT_MAX_SITES: usize = 18;

const LANCZOS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMethod {
    Perturbative,
    ExactGap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SectorInfo {
    pub n_sites: usize,
    pub n_up: usize,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveCouplingReport {
    pub j_eff: f64,
    /// Second-order energy shift; only computed perturbatively.
    pub epsilon: Option<f64>,
    pub method: CouplingMethod,
    pub spec: LadderSpec,
    pub sector: SectorInfo,
    /// Spin of the lowest cluster (exact method).
    pub ground_spin: Option<GroundSpin>,
    /// Energies of the lowest states found in the sector, ascending.
    pub cluster_energies: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroundSpin {
    /// `S(S + 1)` values inside the ground cluster, lowest and highest.
    pub s_squared_min: f64,
    pub s_squared_max: f64,
    /// `S` when the whole cluster shares one integer spin.
    pub spin: Option<usize>,
    /// Set when the ground cluster mixes different total spins.
    pub ambiguous: bool,
}

fn spin_from_s2(s2: f64) -> f64 {
    0.5 * ((1.0 + 4.0 * s2).max(0.0).sqrt() - 1.0)
}

fn sz_zero_sector(n_sites: usize) -> Result<SectorBasis> {
    SectorBasis::enumerate(n_sites, n_sites / 2)
}

/// Second-order coupling `J_eff = J0^2 sum_a (L R* + R L*)/(E_g - E_a)` and
/// shift `eps = (3/4) J0^2 sum_a (|L|^2 + |R|^2)/(E_g - E_a)`, with
/// `L(a) = <g|S^z_L|a>` on the sites the qubits attach to. The sum runs over
/// every eigenstate of the bare ladder; the matrix elements select the
/// triplet tower by themselves.
pub fn perturbative_jeff(spec: &LadderSpec) -> Result<EffectiveCouplingReport> {
    spec.validate()?;
    let n = spec.ladder_sites();
    if n > PERTURBATIVE_MAX_LADDER_SITES {
        return Err(SpinError::Capacity {
            what: "ladder sites for the perturbative sum",
            requested: n,
            cap: PERTURBATIVE_MAX_LADDER_SITES,
        });
    }
    let sector = sz_zero_sector(n)?;
    let h = ladder_medium_hamiltonian(spec, &sector)?;
    let eig = dense_spectrum(&h)?;
    let dim = eig.dim();
    let e_g = eig.values[0];
    let gap = eig.values.get(1).map_or(f64::INFINITY, |e| e - e_g);
    if gap <= 1e-9 * spec.j {
        return Err(SpinError::domain("bare ladder ground state is degenerate"));
    }
    let (l, r) = spec.attachment();
    let sz = |site: usize, i: usize| if sector.state(i) >> site & 1 == 1 { 0.5 } else { -0.5 };
    let g = eig.vectors.column(0);
    let sl_g: Vec<f64> = (0..dim).map(|i| sz(l, i) * g[i]).collect();
    let sr_g: Vec<f64> = (0..dim).map(|i| sz(r, i) * g[i]).collect();
    let (mut j_eff, mut eps) = (0.0, 0.0);
    for a in 1..dim {
        let v = eig.vectors.column(a);
        let la: f64 = v.iter().zip(&sl_g).map(|(x, y)| x * y).sum();
        let ra: f64 = v.iter().zip(&sr_g).map(|(x, y)| x * y).sum();
        let denom = e_g - eig.values[a];
        j_eff += 2.0 * la * ra / denom;
        eps += (la * la + ra * ra) / denom;
    }
    let j02 = spec.j0 * spec.j0;
    Ok(EffectiveCouplingReport {
        j_eff: j02 * j_eff,
        epsilon: Some(0.75 * j02 * eps),
        method: CouplingMethod::Perturbative,
        spec: *spec,
        sector: SectorInfo {
            n_sites: n,
            n_up: n / 2,
            dim,
        },
        ground_spin: None,
        cluster_energies: eig.values[..2.min(dim)].to_vec(),
    })
}

struct FullSolve {
    sector: SectorBasis,
    pairs: LowestEigenpairs,
}

fn solve_full(spec: &LadderSpec, count: usize) -> Result<FullSolve> {
    spec.validate()?;
    let n = spec.total_sites();
    if n > EXACT_MAX_SITES {
        return Err(SpinError::Capacity {
            what: "ladder plus qubit sites",
            requested: n,
            cap: EXACT_MAX_SITES,
        });
    }
    let sector = sz_zero_sector(n)?;
    let h = heisenberg_ladder_hamiltonian(spec, &sector)?;
    let pairs = lowest_eigenpairs(&h, count.min(h.dim()), LANCZOS_TOL)?;
    Ok(FullSolve { sector, pairs })
}

/// Spins present in a cluster, from `S^2` diagonalized inside it.
fn cluster_spin(sector: &SectorBasis, vectors: &[Vec<f64>]) -> Result<GroundSpin> {
    let s2 = total_spin_squared(sector.n_sites());
    let c = vectors.len();
    let mut applied = Vec::with_capacity(c);
    for v in vectors {
        let mut y = vec![0.0; v.len()];
        s2.apply(sector, v, &mut y)?;
        applied.push(y);
    }
    let m = DMatrix::from_fn(c, c, |a, b| vectors[a].iter().zip(&applied[b]).map(|(x, y)| x * y).sum::<f64>());
    let m = (&m + m.transpose()) * 0.5;
    let vals = SymmetricEigen::new(m).eigenvalues;
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (s_lo, s_hi) = (spin_from_s2(lo), spin_from_s2(hi));
    let integer = |s: f64| ((s - s.round()).abs() < 1e-6).then_some(s.round() as usize);
    let ambiguous = (s_hi - s_lo).abs() > 1e-6;
    Ok(GroundSpin {
        s_squared_min: lo,
        s_squared_max: hi,
        spin: if ambiguous { None } else { integer(s_lo) },
        ambiguous,
    })
}

/// Total spin of the ground state of ladder plus qubits.
pub fn lieb_ground_spin(spec: &LadderSpec) -> Result<GroundSpin> {
    if !(spec.j0 > 0.0) {
        return Err(SpinError::domain("the ground-spin rule needs J0 > 0"));
    }
    let solve = solve_full(spec, 1)?;
    let ground = &solve.pairs.clusters[0];
    cluster_spin(&solve.sector, &solve.pairs.vectors[ground.clone()])
}

/// Gap between the two lowest clusters of the full model in `S^z = 0`,
/// identified with `|J_eff|`; positive (antiferromagnetic) when the ground
/// cluster is a singlet.
pub fn exact_spin_gap(spec: &LadderSpec) -> Result<EffectiveCouplingReport> {
    let solve = solve_full(spec, 2)?;
    let pairs = &solve.pairs;
    let ground = pairs.clusters[0].clone();
    let spin = cluster_spin(&solve.sector, &pairs.vectors[ground.clone()])?;
    // with J0 = 0 the two lowest levels coincide and sit in one cluster
    let gap = pairs.values[1] - pairs.values[0];
    let sign = match spin.spin {
        Some(0) => 1.0,
        Some(_) => -1.0,
        None => 0.0,
    };
    let j_eff = if spin.ambiguous { gap } else { sign * gap };
    Ok(EffectiveCouplingReport {
        j_eff,
        epsilon: None,
        method: CouplingMethod::ExactGap,
        spec: *spec,
        sector: SectorInfo {
            n_sites: solve.sector.n_sites(),
            n_up: solve.sector.n_up(),
            dim: solve.sector.len(),
        },
        ground_spin: Some(spin),
        cluster_energies: pairs.values.clone(),
    })
}

/// Gap `E_1 - E_g` of the bare ladder in `S^z = 0`.
pub fn bare_ladder_gap(spec: &LadderSpec) -> Result<f64> {
    spec.validate()?;
    let n = spec.ladder_sites();
    if n > EXACT_MAX_SITES {
        return Err(SpinError::Capacity {
            what: "ladder sites",
            requested: n,
            cap: EXACT_MAX_SITES,
        });
    }
    let sector = sz_zero_sector(n)?;
    let h = ladder_medium_hamiltonian(spec, &sector)?;
    let p = lowest_eigenpairs(&h, 2.min(h.dim()), LANCZOS_TOL)?;
    Ok(p.values[1] - p.values[0])
}

/// Two-qubit content of a state of the full register: `|c_jm|^2` for the
/// pair formed by the last two sites (qubits A and B).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedStateReport {
    pub c00: f64,
    pub c10: f64,
    pub c11: f64,
    pub c1m1: f64,
    pub label: String,
}

/// `|c_11|^2 = |c_1-1|^2 = <1/4 + S^z_A S^z_B>`, `|c_00|^2 = <1/4 - S_A.S_B>`,
/// and `|c_10|^2` from completeness.
pub fn reduced_coefficients(psi: &[f64], basis: &SectorBasis, label: impl Into<String>) -> Result<ReducedStateReport> {
    if basis.twice_sz() != 0 {
        return Err(SpinError::domain(format!(
            "reduced coefficients need the S^z = 0 sector, got 2S^z = {}",
            basis.twice_sz()
        )));
    }
    if psi.len() != basis.len() {
        return Err(SpinError::domain(format!(
            "state of length {} in a sector of {}",
            psi.len(),
            basis.len()
        )));
    }
    let norm: f64 = psi.iter().map(|x| x * x).sum();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(SpinError::domain(format!("state has squared norm {norm}")));
    }
    let n = basis.n_sites();
    if n < 2 {
        return Err(SpinError::domain("register too small for two qubits"));
    }
    let (a, b) = (n - 2, n - 1);
    let mut zz = crate::models::SpinTerms::new(n);
    zz.exchange(a, b, 1.0, 0.0);
    let mut dot = crate::models::SpinTerms::new(n);
    dot.heisenberg(a, b, 1.0);
    let c11 = 0.25 + zz.expectation(basis, psi)?;
    let c00 = 0.25 - dot.expectation(basis, psi)?;
    Ok(ReducedStateReport {
        c00,
        c10: 1.0 - 2.0 * c11 - c00,
        c11,
        c1m1: c11,
        label: label.into(),
    })
}

/// Reduced coefficients of the `count` lowest states of the full model.
pub fn lowest_reduced_states(spec: &LadderSpec, count: usize) -> Result<Vec<ReducedStateReport>> {
    let solve = solve_full(spec, count)?;
    solve
        .pairs
        .vectors
        .iter()
        .take(count)
        .enumerate()
        .map(|(i, v)| reduced_coefficients(v, &solve.sector, format!("state {i}")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingPoint {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "J0")]
    pub j0: f64,
    pub gap: f64,
    pub jeff_perturbative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    /// `p` in `gap ~ prefactor * L^p`.
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub points: Vec<ScalingPoint>,
}

impl ScalingFit {
    /// `L,J,J0,gap,jeff_perturbative` table; an empty last field when the
    /// ladder is too large for the perturbative sum.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("L,J,J0,gap,jeff_perturbative\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                p.l,
                fmt12(p.j),
                fmt12(p.j0),
                fmt12(p.gap),
                p.jeff_perturbative.map(fmt12).unwrap_or_default()
            ));
        }
        out
    }
}

/// Least-squares fit of `log(gap)` against `log(L)` over ladders with
/// `L = N + 1` rungs apart.
pub fn jeff_scaling_fit(l_values: &[usize], j: f64, j0: f64, connection: Connection) -> Result<ScalingFit> {
    let mut ls = l_values.to_vec();
    ls.sort_unstable();
    ls.dedup();
    if ls.len() < 3 {
        return Err(SpinError::domain(format!(
            "scaling fit needs at least 3 distinct distances, got {}",
            ls.len()
        )));
    }
    if ls[0] < 2 {
        return Err(SpinError::domain("distance L must be at least 2"));
    }
    let specs: Vec<LadderSpec> = ls
        .iter()
        .map(|&l| LadderSpec::new(l - 1, j, j0, connection))
        .collect::<Result<_>>()?;
    if let Some(big) = specs.iter().find(|s| s.total_sites() > EXACT_MAX_SITES) {
        return Err(SpinError::Capacity {
            what: "ladder plus qubit sites",
            requested: big.total_sites(),
            cap: EXACT_MAX_SITES,
        });
    }
    let points: Vec<ScalingPoint> = specs
        .par_iter()
        .map(|spec| {
            let gap = exact_spin_gap(spec)?.j_eff.abs();
            let pert = if spec.ladder_sites() <= PERTURBATIVE_MAX_LADDER_SITES {
                Some(perturbative_jeff(spec)?.j_eff)
            } else {
                None
            };
            Ok(ScalingPoint {
                l: spec.distance(),
                j,
                j0,
                gap,
                jeff_perturbative: pert,
            })
        })
        .collect::<Result<_>>()?;
    if let Some(p) = points.iter().find(|p| !(p.gap > 0.0)) {
        return Err(SpinError::domain(format!("vanishing gap at L = {}", p.l)));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.l as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.gap).collect();
    let (exponent, prefactor, r_squared) = power_law_fit(&xs, &ys)?;
    Ok(ScalingFit {
        exponent,
        prefactor,
        r_squared,
        points,
    })
}

/// `(p, c, r^2)` of the least-squares line `log y = p log x + log c`.
pub fn power_law_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(SpinError::domain("power-law fit needs at least two matching points"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(SpinError::domain("power-law fit needs positive data"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(SpinError::domain("power-law fit needs distinct abscissae"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok((slope, (my - slope * mx).exp(), r_squared))
}
