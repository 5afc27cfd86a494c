//! Fixed-magnetization sectors of a register of spin-1/2 sites.
//!
//! A configuration is a bit pattern with one bit per site (bit `i` set means
//! site `i` points up). Sites are numbered from zero here; user-facing
//! inputs number them from one.

use std::collections::HashMap;

use crate::error::{Result, SpinError};

/// Largest sector the enumerator will build.
pub const MAX_SECTOR_STATES: usize = 20_000_000;

/// Largest register that fits in the `u64` bit pattern.
pub const MAX_SITES: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfiguration {
    bits: u64,
    n_sites: usize,
}

impl SpinConfiguration {
    pub fn new(bits: u64, n_sites: usize) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(SpinError::domain(format!(
                "register of {n_sites} sites is not supported (1..={MAX_SITES})"
            )));
        }
        if bits >> n_sites != 0 {
            return Err(SpinError::domain(format!(
                "bit pattern {bits:#b} has bits above site {n_sites}"
            )));
        }
        Ok(Self { bits, n_sites })
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    #[inline]
    pub fn is_up(&self, site: usize) -> bool {
        self.bits >> site & 1 == 1
    }

    pub fn n_up(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// The configuration with site order reversed.
    pub fn reversed(&self) -> Self {
        let bits = self.bits.reverse_bits() >> (64 - self.n_sites);
        Self {
            bits,
            n_sites: self.n_sites,
        }
    }
}

/// All configurations of `n_sites` spins with exactly `n_up` up spins, in
/// ascending bit-pattern order.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    n_sites: usize,
    n_up: usize,
    states: Vec<u64>,
    index_of: HashMap<u64, usize>,
}

/// Binomial coefficient, saturating at `usize::MAX`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Next larger integer with the same popcount (Gosper's hack).
#[inline]
fn next_same_popcount(v: u64) -> u64 {
    let c = v & v.wrapping_neg();
    let r = v + c;
    (((r ^ v) >> 2) / c) | r
}

impl SectorBasis {
    pub fn enumerate(n_sites: usize, n_up: usize) -> Result<Self> {
        Self::enumerate_with_cap(n_sites, n_up, MAX_SECTOR_STATES)
    }

    pub fn enumerate_with_cap(n_sites: usize, n_up: usize, cap: usize) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(SpinError::domain(format!(
                "register of {n_sites} sites is not supported (1..={MAX_SITES})"
            )));
        }
        if n_up > n_sites {
            return Err(SpinError::domain(format!(
                "n_up = {n_up} exceeds the {n_sites} available sites"
            )));
        }
        let dim = binomial(n_sites, n_up);
        if dim > cap {
            return Err(SpinError::Capacity {
                what: "sector basis states",
                requested: dim,
                cap,
            });
        }
        let mut states = Vec::with_capacity(dim);
        if n_up == 0 {
            states.push(0);
        } else {
            let mut v: u64 = (1u64 << n_up) - 1;
            for _ in 0..dim {
                states.push(v);
                if n_up < 64 {
                    v = next_same_popcount(v);
                }
            }
        }
        let index_of = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(Self {
            n_sites,
            n_up,
            states,
            index_of,
        })
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    #[inline]
    pub fn n_up(&self) -> usize {
        self.n_up
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Twice the total z-magnetization, `2 S^z = n_up - n_down`.
    pub fn twice_sz(&self) -> i64 {
        2 * self.n_up as i64 - self.n_sites as i64
    }

    #[inline]
    pub fn state(&self, i: usize) -> u64 {
        self.states[i]
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn configuration(&self, i: usize) -> SpinConfiguration {
        SpinConfiguration {
            bits: self.states[i],
            n_sites: self.n_sites,
        }
    }

    #[inline]
    pub fn index_of(&self, bits: u64) -> Option<usize> {
        self.index_of.get(&bits).copied()
    }

    /// Index permutation induced by reversing the site order.
    pub fn mirror_permutation(&self) -> Vec<usize> {
        self.states
            .iter()
            .map(|&s| {
                let r = SpinConfiguration {
                    bits: s,
                    n_sites: self.n_sites,
                }
                .reversed();
                self.index_of[&r.bits]
            })
            .collect()
    }

    /// Index permutation induced by an arbitrary site relabelling
    /// (`site_map[i]` is the new position of site `i`).
    pub fn site_permutation(&self, site_map: &[usize]) -> Result<Vec<usize>> {
        if site_map.len() != self.n_sites {
            return Err(SpinError::domain("site map length differs from register size"));
        }
        let mut seen = vec![false; self.n_sites];
        for &t in site_map {
            if t >= self.n_sites || std::mem::replace(&mut seen[t], true) {
                return Err(SpinError::domain("site map is not a permutation"));
            }
        }
        Ok(self
            .states
            .iter()
            .map(|&s| {
                let mut out = 0u64;
                for (i, &t) in site_map.iter().enumerate() {
                    out |= (s >> i & 1) << t;
                }
                self.index_of[&out]
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sector_sizes() {
        assert_eq!(SectorBasis::enumerate(4, 2).unwrap().len(), 6);
        assert_eq!(SectorBasis::enumerate(14, 7).unwrap().len(), 3432);
        assert_eq!(SectorBasis::enumerate(5, 0).unwrap().len(), 1);
        assert_eq!(SectorBasis::enumerate(5, 5).unwrap().len(), 1);
    }

    #[test]
    fn single_excitation_is_one_hot() {
        let b = SectorBasis::enumerate(5, 1).unwrap();
        assert_eq!(b.states(), &[1, 2, 4, 8, 16]);
    }

    #[test]
    fn out_of_range_and_cap() {
        assert!(matches!(
            SectorBasis::enumerate(4, 5),
            Err(SpinError::Domain(_))
        ));
        assert!(matches!(
            SectorBasis::enumerate_with_cap(20, 10, 1000),
            Err(SpinError::Capacity { .. })
        ));
        assert!(matches!(
            SectorBasis::enumerate(60, 30),
            Err(SpinError::Capacity { .. })
        ));
    }

    #[test]
    fn mirror_of_one_hot_and_pairs() {
        let b = SectorBasis::enumerate(5, 1).unwrap();
        // site k <-> site 6-k in 1-based labels
        assert_eq!(b.mirror_permutation(), vec![4, 3, 2, 1, 0]);

        let b = SectorBasis::enumerate(4, 2).unwrap();
        let p = b.mirror_permutation();
        let i = b.index_of(0b0011).unwrap();
        assert_eq!(b.state(p[i]), 0b1100);
    }

    #[test]
    fn configuration_rejects_high_bits() {
        assert!(SpinConfiguration::new(0b1000, 3).is_err());
        let c = SpinConfiguration::new(0b001, 3).unwrap();
        assert_eq!(c.reversed().bits(), 0b100);
    }

    proptest! {
        #[test]
        fn basis_invariants(n in 1usize..13, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).round() as usize;
            let b = SectorBasis::enumerate(n, k).unwrap();
            prop_assert_eq!(b.len(), binomial(n, k));
            for (i, &s) in b.states().iter().enumerate() {
                prop_assert_eq!(b.index_of(s), Some(i));
                prop_assert_eq!(s.count_ones() as usize, k);
                prop_assert!(s >> n == 0);
            }
            prop_assert!(b.states().windows(2).all(|w| w[0] < w[1]));
            let p = b.mirror_permutation();
            for i in 0..b.len() {
                prop_assert_eq!(p[p[i]], i);
            }
        }

        #[test]
        fn exchange_stays_in_sector(n in 2usize..11, frac in 0.0f64..=1.0, i in 0usize..10, j in 0usize..10) {
            let k = ((n as f64) * frac).round() as usize;
            let (i, j) = (i % n, j % n);
            prop_assume!(i != j);
            let b = SectorBasis::enumerate(n, k).unwrap();
            for &s in b.states() {
                if (s >> i & 1) != (s >> j & 1) {
                    let flipped = s ^ (1 << i) ^ (1 << j);
                    prop_assert!(b.index_of(flipped).is_some());
                }
            }
        }
    }
}
