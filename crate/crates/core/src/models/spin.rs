//! Generic spin-1/2 couplings evaluated on a fixed-magnetization sector.

use crate::basis::SectorBasis;
use crate::error::{Result, SpinError};
use crate::matrix::HamiltonianMatrix;

/// `zz S^z_i S^z_j + (flip / 2)(S^+_i S^-_j + S^-_i S^+_j)` with `S = sigma / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exchange {
    pub i: usize,
    pub j: usize,
    pub zz: f64,
    pub flip: f64,
}

/// A sum of two-site exchange terms and single-site `h S^z` fields.
///
/// Every term conserves total `S^z`, so the operator never leaves the sector
/// it is evaluated on.
#[derive(Debug, Clone, Default)]
pub struct SpinTerms {
    n_sites: usize,
    exchange: Vec<Exchange>,
    fields: Vec<(usize, f64)>,
    constant: f64,
}

impl SpinTerms {
    pub fn new(n_sites: usize) -> Self {
        Self {
            n_sites,
            ..Default::default()
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Isotropic `coupling * S_i . S_j`.
    pub fn heisenberg(&mut self, i: usize, j: usize, coupling: f64) -> &mut Self {
        self.exchange(i, j, coupling, coupling)
    }

    pub fn exchange(&mut self, i: usize, j: usize, zz: f64, flip: f64) -> &mut Self {
        assert!(i != j && i < self.n_sites && j < self.n_sites, "bad bond ({i}, {j})");
        self.exchange.push(Exchange { i, j, zz, flip });
        self
    }

    pub fn field(&mut self, site: usize, h: f64) -> &mut Self {
        assert!(site < self.n_sites, "bad site {site}");
        self.fields.push((site, h));
        self
    }

    pub fn constant(&mut self, c: f64) -> &mut Self {
        self.constant += c;
        self
    }

    fn check_sector(&self, sector: &SectorBasis) -> Result<()> {
        if sector.n_sites() != self.n_sites {
            return Err(SpinError::domain(format!(
                "sector has {} sites, model has {}",
                sector.n_sites(),
                self.n_sites
            )));
        }
        Ok(())
    }

    fn diagonal_of(&self, s: u64) -> f64 {
        let sz = |site: usize| if s >> site & 1 == 1 { 0.5 } else { -0.5 };
        let mut d = self.constant;
        for e in &self.exchange {
            d += e.zz * sz(e.i) * sz(e.j);
        }
        for &(site, h) in &self.fields {
            d += h * sz(site);
        }
        d
    }

    /// Matrix of the operator restricted to `sector`.
    pub fn build(&self, sector: &SectorBasis, tag: impl Into<String>) -> Result<HamiltonianMatrix> {
        self.check_sector(sector)?;
        let mut triplets = Vec::new();
        for (col, &s) in sector.states().iter().enumerate() {
            let d = self.diagonal_of(s);
            if d != 0.0 {
                triplets.push((col, col, d));
            }
            for e in &self.exchange {
                if e.flip == 0.0 || (s >> e.i & 1) == (s >> e.j & 1) {
                    continue;
                }
                let t = s ^ (1 << e.i) ^ (1 << e.j);
                let row = sector
                    .index_of(t)
                    .expect("spin-conserving exchange left the sector");
                triplets.push((row, col, 0.5 * e.flip));
            }
        }
        Ok(HamiltonianMatrix::from_triplets(sector.len(), triplets, tag))
    }

    /// Applies the operator to a vector without assembling it.
    pub fn apply(&self, sector: &SectorBasis, x: &[f64], y: &mut [f64]) -> Result<()> {
        self.check_sector(sector)?;
        for (col, &s) in sector.states().iter().enumerate() {
            y[col] = self.diagonal_of(s) * x[col];
        }
        for (col, &s) in sector.states().iter().enumerate() {
            if x[col] == 0.0 {
                continue;
            }
            for e in &self.exchange {
                if e.flip == 0.0 || (s >> e.i & 1) == (s >> e.j & 1) {
                    continue;
                }
                let t = s ^ (1 << e.i) ^ (1 << e.j);
                let row = sector.index_of(t).expect("exchange left the sector");
                y[row] += 0.5 * e.flip * x[col];
            }
        }
        Ok(())
    }

    /// `<x|O|x>` for a real vector.
    pub fn expectation(&self, sector: &SectorBasis, x: &[f64]) -> Result<f64> {
        let mut y = vec![0.0; x.len()];
        self.apply(sector, x, &mut y)?;
        Ok(x.iter().zip(&y).map(|(a, b)| a * b).sum())
    }
}

/// Total spin squared `(sum_i S_i)^2` over every site of the register.
pub fn total_spin_squared(n_sites: usize) -> SpinTerms {
    let mut t = SpinTerms::new(n_sites);
    t.constant(0.75 * n_sites as f64);
    for i in 0..n_sites {
        for j in i + 1..n_sites {
            t.heisenberg(i, j, 2.0);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_spin_heisenberg_levels() {
        let sector = SectorBasis::enumerate(2, 1).unwrap();
        let mut t = SpinTerms::new(2);
        t.heisenberg(0, 1, 1.0);
        let h = t.build(&sector, "pair").unwrap().to_dense();
        let ev = h.symmetric_eigenvalues();
        let mut ev: Vec<f64> = ev.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] + 0.75).abs() < 1e-14);
        assert!((ev[1] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn spin_squared_of_polarized_state() {
        let n = 5;
        let sector = SectorBasis::enumerate(n, 0).unwrap();
        let s2 = total_spin_squared(n).expectation(&sector, &[1.0]).unwrap();
        // S = 5/2
        assert!((s2 - 2.5 * 3.5).abs() < 1e-12);
    }

    #[test]
    fn apply_matches_build() {
        let sector = SectorBasis::enumerate(6, 3).unwrap();
        let mut t = SpinTerms::new(6);
        t.heisenberg(0, 1, 1.3).exchange(2, 5, 0.4, -0.7).field(3, 0.2);
        let h = t.build(&sector, "x").unwrap();
        let x: Vec<f64> = (0..sector.len()).map(|i| (i as f64 * 0.37).cos()).collect();
        let mut a = vec![0.0; x.len()];
        let mut b = vec![0.0; x.len()];
        h.matvec(&x, &mut a);
        t.apply(&sector, &x, &mut b).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-13);
        }
        assert!(h.is_symmetric(1e-12));
    }

    #[test]
    fn sector_mismatch_is_an_error() {
        let sector = SectorBasis::enumerate(4, 2).unwrap();
        assert!(SpinTerms::new(5).build(&sector, "x").is_err());
    }
}
