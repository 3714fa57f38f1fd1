//! Number sectors of a truncated bosonic Fock space and the sparse structure
//! of one-body operators `Σ B_ij a†_i a_j` on them.

use std::collections::HashMap;

use crate::counting::binomial;
use crate::error::{Error, Result};

/// Largest total basis size the oracle will enumerate.
pub const MAX_DIMENSION: usize = 100_000;

/// Occupation vectors over `sites` modes with at most `n_max` bosons per mode
/// and at most `p_total` in total.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedFockSpace {
    pub sites: usize,
    pub n_max: usize,
    pub p_total: usize,
}

impl TruncatedFockSpace {
    pub fn new(sites: usize, n_max: usize, p_total: usize) -> Result<Self> {
        if sites == 0 {
            return Err(Error::Domain("Fock space needs at least one site".into()));
        }
        let space = Self { sites, n_max, p_total };
        let d = space.dimension();
        if d > MAX_DIMENSION {
            return Err(Error::Capacity { what: "truncated Fock dimension", got: d, limit: MAX_DIMENSION });
        }
        Ok(space)
    }

    pub fn dimension(&self) -> usize {
        (0..=self.p_total).map(|n| self.sector_dimension(n)).sum()
    }

    /// Number of occupation vectors with total `n`, counted by
    /// inclusion–exclusion over modes exceeding `n_max`.
    pub fn sector_dimension(&self, n: usize) -> usize {
        let (s, cap) = (self.sites, self.n_max + 1);
        let mut total = 0.0;
        for k in 0..=s {
            if k * cap > n {
                break;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * binomial(s, k) * binomial(n - k * cap + s - 1, s - 1);
        }
        total.round() as usize
    }

    /// Basis of the `n`-particle sector in lexicographic order.
    pub fn sector_basis(&self, n: usize) -> Vec<Vec<u8>> {
        fn fill(site: usize, left: usize, cur: &mut Vec<u8>, cap: usize, out: &mut Vec<Vec<u8>>) {
            if site + 1 == cur.len() {
                if left <= cap {
                    cur[site] = left as u8;
                    out.push(cur.clone());
                }
                return;
            }
            for k in (0..=left.min(cap)).rev() {
                cur[site] = k as u8;
                fill(site + 1, left - k, cur, cap, out);
            }
        }
        let mut out = Vec::new();
        fill(0, n, &mut vec![0; self.sites], self.n_max.min(u8::MAX as usize), &mut out);
        out
    }
}

/// One non-zero of `a†_i a_j` in a sector: `<row| a†_i a_j |col> = factor`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Hop {
    pub row: u32,
    pub col: u32,
    pub i: u8,
    pub j: u8,
    pub factor: f64,
}

/// Basis and hopping table of one number sector. The table depends only on
/// the basis, so one sector serves every `B`.
#[derive(Debug, Clone)]
pub(crate) struct Sector {
    pub basis: Vec<Vec<u8>>,
    pub hops: Vec<Hop>,
}

impl Sector {
    pub fn build(space: &TruncatedFockSpace, n: usize) -> Self {
        let basis = space.sector_basis(n);
        let index: HashMap<&[u8], u32> = basis.iter().enumerate().map(|(k, b)| (b.as_slice(), k as u32)).collect();
        let mut hops = Vec::new();
        let mut target = vec![0u8; space.sites];
        for (col, state) in basis.iter().enumerate() {
            for j in 0..space.sites {
                let nj = state[j];
                if nj == 0 {
                    continue;
                }
                for i in 0..space.sites {
                    if i == j {
                        hops.push(Hop { row: col as u32, col: col as u32, i: i as u8, j: j as u8, factor: nj as f64 });
                        continue;
                    }
                    if state[i] as usize >= space.n_max {
                        continue;
                    }
                    target.copy_from_slice(state);
                    target[j] -= 1;
                    target[i] += 1;
                    let row = index[target.as_slice()];
                    let factor = (nj as f64 * (state[i] as f64 + 1.0)).sqrt();
                    hops.push(Hop { row, col: col as u32, i: i as u8, j: j as u8, factor });
                }
            }
        }
        Self { basis, hops }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn position(&self, occupations: &[u8]) -> Option<usize> {
        self.basis.binary_search_by(|b| occupations.cmp(b.as_slice())).ok()
    }
}
