//! Counting distributions of Fock states with at most one atom per site.
//!
//! With `A'` the correlation matrix restricted to the occupied sites,
//! `G(s) = per((I - A') + sA') = Σ_m p(m) s^m`. The coefficients are
//! recovered from values of `G` at a set of nodes.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::distribution::CountingDistribution;
use super::permanent::{permanent_linear_pencil, ryser, MAX_PERMANENT_DIM};
use crate::error::{Error, Result};

/// How the coefficients of `G(s)` are recovered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extraction {
    /// `G` at the `P+1` roots of unity followed by a discrete Fourier
    /// transform: a unitary map, so no conditioning loss at any `P`.
    #[default]
    RootsOfUnity,
    /// `G` at real Chebyshev nodes and a Vandermonde solve. Guarded to
    /// `P ≤ 12`.
    Chebyshev,
    /// Ryser's formula over degree-one polynomial entries, `O(2^P P²)`.
    /// Guarded to `P ≤ 16`.
    Symbolic,
}

pub const CHEBYSHEV_MAX_DEGREE: usize = 12;
pub const SYMBOLIC_MAX_DEGREE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingOptions {
    /// When every `|A'_ij|` (`i ≠ j`) is below this fraction of the mean
    /// occupied diagonal, off-diagonals are dropped and `G` factorises into
    /// `Π (1 - a_i + s a_i)`. `None` always uses the permanent.
    pub offdiag_threshold: Option<f64>,
    pub extraction: Extraction,
}

impl Default for CountingOptions {
    fn default() -> Self {
        Self { offdiag_threshold: Some(1e-6), extraction: Extraction::RootsOfUnity }
    }
}

impl CountingOptions {
    pub fn exact() -> Self {
        Self { offdiag_threshold: None, ..Self::default() }
    }
}

pub fn fock_probabilities(a: &DMatrix<Complex64>, occupations: &[u8]) -> Result<CountingDistribution> {
    fock_probabilities_with(a, occupations, &CountingOptions::default())
}

pub fn fock_probabilities_with(
    a: &DMatrix<Complex64>,
    occupations: &[u8],
    options: &CountingOptions,
) -> Result<CountingDistribution> {
    let block = occupied_block(a, occupations)?;
    let p = block.nrows();
    if p == 0 {
        return CountingDistribution::from_probabilities(vec![1.0]);
    }
    if negligible_offdiagonal(&block, options.offdiag_threshold) {
        let diag: Vec<f64> = block.diagonal().iter().map(|z| z.re).collect();
        let mean = diag.iter().sum();
        let variance = diag.iter().map(|a| a * (1.0 - a)).sum();
        return CountingDistribution::with_moments(poisson_binomial(&diag), mean, variance);
    }
    if p > MAX_PERMANENT_DIM {
        return Err(Error::Capacity { what: "occupied sites", got: p, limit: MAX_PERMANENT_DIM });
    }
    let coefficients = match options.extraction {
        Extraction::RootsOfUnity => roots_of_unity_coefficients(&block)?,
        Extraction::Chebyshev => chebyshev_coefficients(&block)?,
        Extraction::Symbolic => {
            if p > SYMBOLIC_MAX_DEGREE {
                return Err(Error::Capacity { what: "symbolic extraction degree", got: p, limit: SYMBOLIC_MAX_DEGREE });
            }
            let id = DMatrix::<Complex64>::identity(p, p);
            permanent_linear_pencil(&(&id - &block), &block)?
        }
    };
    let (mean, variance) = fock_moments(&block);
    CountingDistribution::with_moments(real_parts(&coefficients)?, mean, variance)
}

/// Exact mean and variance for a hard-core Fock state with occupied block
/// `A'`: `m̄ = tr A'`, `σ² = tr A' + tr A'² - 2 Σ_i A'_ii²`.
pub fn fock_moments(block: &DMatrix<Complex64>) -> (f64, f64) {
    let n = block.nrows();
    let mean: f64 = (0..n).map(|i| block[(i, i)].re).sum();
    let square: f64 = block.iter().map(|z| z.norm_sqr()).sum();
    let diag2: f64 = (0..n).map(|i| block[(i, i)].re.powi(2)).sum();
    (mean, mean + square - 2.0 * diag2)
}

/// `cov(m, n) = Re tr(A1' A2') - 2 Σ_i A1'_ii A2'_ii` for a hard-core Fock state.
pub fn fock_covariance(b1: &DMatrix<Complex64>, b2: &DMatrix<Complex64>) -> f64 {
    let n = b1.nrows();
    let mut trace = 0.0;
    for i in 0..n {
        for j in 0..n {
            trace += (b1[(i, j)] * b2[(j, i)]).re;
        }
    }
    trace - 2.0 * (0..n).map(|i| b1[(i, i)].re * b2[(i, i)].re).sum::<f64>()
}

/// `A'_ij = n_i n_j A_ij`, keeping only the occupied rows and columns.
pub fn occupied_block(a: &DMatrix<Complex64>, occupations: &[u8]) -> Result<DMatrix<Complex64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::Domain(format!("correlation matrix must be square, got {}x{}", a.nrows(), a.ncols())));
    }
    if occupations.len() != a.nrows() {
        return Err(Error::Domain(format!(
            "{} occupations for a {}-site correlation matrix",
            occupations.len(),
            a.nrows()
        )));
    }
    if let Some(n) = occupations.iter().find(|&&n| n > 1) {
        return Err(Error::Domain(format!("occupation {n} is not 0 or 1")));
    }
    let idx: Vec<usize> = (0..occupations.len()).filter(|&i| occupations[i] == 1).collect();
    Ok(a.select_rows(&idx).select_columns(&idx))
}

pub(crate) fn negligible_offdiagonal(block: &DMatrix<Complex64>, threshold: Option<f64>) -> bool {
    let Some(t) = threshold else { return false };
    let n = block.nrows();
    let mean_diag = block.diagonal().iter().map(|z| z.re).sum::<f64>() / n as f64;
    let limit = t * mean_diag.abs();
    (0..n).all(|i| (0..n).all(|j| i == j || block[(i, j)].norm() <= limit))
}

/// Coefficients of `Π_i (1 - a_i + s a_i)`.
pub fn poisson_binomial(a: &[f64]) -> Vec<f64> {
    let mut p = vec![0.0; a.len() + 1];
    p[0] = 1.0;
    for (k, &ai) in a.iter().enumerate() {
        for m in (0..=k + 1).rev() {
            let from_below = if m > 0 { p[m - 1] * ai } else { 0.0 };
            p[m] = p[m] * (1.0 - ai) + from_below;
        }
    }
    p
}

fn pencil_at(block: &DMatrix<Complex64>, s: Complex64) -> Vec<Complex64> {
    let p = block.nrows();
    let mut rows = Vec::with_capacity(p * p);
    for i in 0..p {
        for j in 0..p {
            let delta = if i == j { 1.0 } else { 0.0 };
            rows.push(delta + (s - 1.0) * block[(i, j)]);
        }
    }
    rows
}

pub(crate) fn root_of_unity(k: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % n) as f64 / n as f64)
}

/// Values of `G` at `ω^k`, `k = 0..=P`, using `G(ω̄) = conj G(ω)` for
/// Hermitian `A'` to halve the work.
fn roots_of_unity_coefficients(block: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let p = block.nrows();
    let n = p + 1;
    let half: Vec<Complex64> = (0..=n / 2)
        .into_par_iter()
        .map(|k| ryser(&pencil_at(block, root_of_unity(k, n)), p))
        .collect();
    let values: Vec<Complex64> = (0..n).map(|k| if k <= n / 2 { half[k] } else { half[n - k].conj() }).collect();
    Ok(inverse_dft(&values))
}

/// `c_m = (1/n) Σ_k v_k ω^{-km}`.
pub(crate) fn inverse_dft(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    (0..n)
        .map(|m| values.iter().enumerate().map(|(k, &v)| v * root_of_unity(k * m, n).conj()).sum::<Complex64>() / n as f64)
        .collect()
}

/// Chebyshev nodes of the first kind on `[-1, 1]`; a monomial Vandermonde
/// system on these nodes has condition number growing like `(1+√2)^P`.
fn chebyshev_coefficients(block: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let p = block.nrows();
    if p > CHEBYSHEV_MAX_DEGREE {
        return Err(Error::Capacity { what: "Chebyshev extraction degree", got: p, limit: CHEBYSHEV_MAX_DEGREE });
    }
    let n = p + 1;
    let nodes: Vec<f64> = (0..n).map(|k| (PI * (2 * k + 1) as f64 / (2 * n) as f64).cos()).collect();
    let values: Vec<Complex64> =
        nodes.par_iter().map(|&s| ryser(&pencil_at(block, Complex64::new(s, 0.0)), p)).collect();
    let vandermonde = DMatrix::from_fn(n, n, |i, j| Complex64::new(nodes[i].powi(j as i32), 0.0));
    let rhs = nalgebra::DVector::from_vec(values);
    let solution = vandermonde
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Invariant("singular Vandermonde system".into()))?;
    Ok(solution.iter().copied().collect())
}

fn real_parts(coefficients: &[Complex64]) -> Result<Vec<f64>> {
    let scale = coefficients.iter().map(|c| c.norm()).fold(1.0, f64::max);
    if let Some((m, c)) = coefficients.iter().enumerate().find(|(_, c)| c.im.abs() > 1e-9 * scale) {
        return Err(Error::Invariant(format!("p[{m}] = {c} has a non-negligible imaginary part")));
    }
    Ok(coefficients.iter().map(|c| c.re).collect())
}
