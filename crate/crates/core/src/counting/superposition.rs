//! Symmetric superposition of all `C(N_s, N_p)` hard-core patterns.
//!
//! Expanding `<ψ| :(a†Aa)^k: |ψ>/k!` over pattern pairs gives
//!
//! `F(k) = C(N_s,N_p)^{-1} Σ_{|I|=|J|=k} C(N_s - |I∪J|, N_p - k) per(A[I,J])`,
//!
//! and `Q(λ) = Σ_k (-λ)^k F(k)`. The diagonal part `I = J` is the
//! principal-minor term; the fully disjoint part `I ∩ J = ∅` sums to
//! `2^k Σ_{k-matchings} Π Re A_ij`. Partially overlapping `(I, J)` only appear
//! from `k = 2`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::distribution::CountingDistribution;
use super::generating::{binomial, binomial_signed, GeneratingPolynomial};
use super::permanent::{principal_permanent_sums, ryser};
use crate::error::{Error, Result};

/// Readings of the pair-sum term `K(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KInterpretation {
    /// Full expansion over all `(I, J)`, including partial overlaps.
    #[default]
    Complete,
    /// Principal-minor term plus `2^k` × (sum over unordered sets of `k`
    /// disjoint pairs of `Π Re A_ij`).
    Matchings,
    /// As `Matchings`, with ordered pair families (`k!` × matchings).
    OrderedPairs,
    /// As `Matchings`, with `K(k) = (Σ_{i<j} Re A_ij)^k`.
    SumPower,
}

impl KInterpretation {
    pub const ALL: [KInterpretation; 4] = [Self::Complete, Self::Matchings, Self::OrderedPairs, Self::SumPower];
}

impl std::str::FromStr for KInterpretation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete" => Ok(Self::Complete),
            "matchings" => Ok(Self::Matchings),
            "ordered_pairs" => Ok(Self::OrderedPairs),
            "sum_power" => Ok(Self::SumPower),
            _ => Err(Error::Domain(format!("unknown K interpretation `{s}`"))),
        }
    }
}

pub const MAX_SUPERPOSITION_SITES: usize = 12;

pub fn superposition_generating(
    a: &DMatrix<Complex64>,
    particles: usize,
    sites: usize,
    interpretation: KInterpretation,
) -> Result<GeneratingPolynomial> {
    if a.nrows() != a.ncols() || a.nrows() != sites {
        return Err(Error::Domain(format!("N_s = {sites} but A is {}x{}", a.nrows(), a.ncols())));
    }
    if particles == 0 || particles > sites {
        return Err(Error::Domain(format!("need 0 < N_p ≤ N_s, got N_p = {particles}, N_s = {sites}")));
    }
    if sites > MAX_SUPERPOSITION_SITES {
        return Err(Error::Capacity { what: "superposition sites", got: sites, limit: MAX_SUPERPOSITION_SITES });
    }
    let f = match interpretation {
        KInterpretation::Complete => complete_terms(a, particles, sites),
        _ => two_term(a, particles, sites, interpretation)?,
    };
    let coefficients = f
        .into_iter()
        .enumerate()
        .map(|(k, fk)| if k == 0 { Complex64::new(1.0, 0.0) } else if k % 2 == 0 { fk } else { -fk })
        .collect();
    Ok(GeneratingPolynomial { coefficients })
}

pub fn superposition_probabilities(
    a: &DMatrix<Complex64>,
    particles: usize,
    sites: usize,
    interpretation: KInterpretation,
) -> Result<CountingDistribution> {
    superposition_generating(a, particles, sites, interpretation)?.to_distribution()
}

fn complete_terms(a: &DMatrix<Complex64>, np: usize, ns: usize) -> Vec<Complex64> {
    let norm = binomial(ns, np);
    let mut f = vec![Complex64::new(0.0, 0.0); np + 1];
    let subsets_by_size: Vec<Vec<usize>> = {
        let mut by = vec![Vec::new(); ns + 1];
        for s in 0usize..(1 << ns) {
            by[s.count_ones() as usize].push(s);
        }
        by
    };
    for (k, fk) in f.iter_mut().enumerate() {
        let subsets = &subsets_by_size[k];
        let mut total = Complex64::new(0.0, 0.0);
        for &rows in subsets {
            let ri: Vec<usize> = (0..ns).filter(|&i| rows >> i & 1 == 1).collect();
            for &cols in subsets {
                let union = (rows | cols).count_ones() as i64;
                let weight = binomial_signed(ns as i64 - union, np as i64 - k as i64);
                if weight == 0.0 {
                    continue;
                }
                let cj: Vec<usize> = (0..ns).filter(|&j| cols >> j & 1 == 1).collect();
                let m: Vec<Complex64> = ri.iter().flat_map(|&i| cj.iter().map(move |&j| a[(i, j)])).collect();
                total += weight * ryser(&m, k);
            }
        }
        *fk = total / norm;
    }
    f
}

fn two_term(a: &DMatrix<Complex64>, np: usize, ns: usize, interpretation: KInterpretation) -> Result<Vec<Complex64>> {
    let norm = binomial(ns, np);
    let minors = principal_permanent_sums(a)?;
    let matchings = matching_sums(a, np);
    let pair_sum: f64 = (0..ns).flat_map(|i| (i + 1..ns).map(move |j| (i, j))).map(|(i, j)| a[(i, j)].re).sum();
    let mut f = Vec::with_capacity(np + 1);
    for k in 0..=np {
        let kk = match interpretation {
            KInterpretation::Matchings => matchings[k],
            KInterpretation::OrderedPairs => matchings[k] * factorial(k),
            KInterpretation::SumPower => pair_sum.powi(k as i32),
            KInterpretation::Complete => unreachable!(),
        };
        let (ns, np, ki) = (ns as i64, np as i64, k as i64);
        let first = binomial_signed(ns - ki, np - ki) * minors[k];
        let second = binomial_signed(ns - 2 * ki, np - ki) * 2f64.powi(k as i32) * kk;
        f.push((first + second) / norm);
    }
    Ok(f)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `Σ Π_{(i,j)} Re A_ij` over all sets of `k` vertex-disjoint pairs, for
/// `k = 0..=kmax`, by recursion on the lowest free site.
pub fn matching_sums(a: &DMatrix<Complex64>, kmax: usize) -> Vec<f64> {
    let n = a.nrows();
    let mut memo: std::collections::HashMap<u64, Vec<f64>> = std::collections::HashMap::new();
    fn rec(free: u64, a: &DMatrix<Complex64>, kmax: usize, memo: &mut std::collections::HashMap<u64, Vec<f64>>) -> Vec<f64> {
        if free == 0 {
            let mut v = vec![0.0; kmax + 1];
            v[0] = 1.0;
            return v;
        }
        if let Some(v) = memo.get(&free) {
            return v.clone();
        }
        let i = free.trailing_zeros() as usize;
        let rest = free & !(1 << i);
        let mut out = rec(rest, a, kmax, memo);
        let mut others = rest;
        while others != 0 {
            let j = others.trailing_zeros() as usize;
            others &= others - 1;
            let w = a[(i, j)].re;
            let sub = rec(rest & !(1 << j), a, kmax, memo);
            for k in 1..=kmax {
                out[k] += w * sub[k - 1];
            }
        }
        memo.insert(free, out.clone());
        out
    }
    rec((1u64 << n) - 1, a, kmax, &mut memo)
}
