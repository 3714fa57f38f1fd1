use num_complex::Complex64;

use super::distribution::CountingDistribution;
use crate::error::{Error, Result};

/// Imaginary parts of assembled coefficients above this signal a
/// non-Hermitian input.
pub const IMAG_TOL: f64 = 1e-10;

/// `Q(λ) = Σ_k c_k λ^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingPolynomial {
    pub coefficients: Vec<Complex64>,
}

impl GeneratingPolynomial {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        let poly = Self { coefficients };
        poly.check()?;
        Ok(poly)
    }

    /// Coefficients of `Q(λ) = Σ_m p(m) (1-λ)^m`.
    pub fn from_distribution(dist: &CountingDistribution) -> Self {
        let p = &dist.probabilities;
        let coefficients = (0..p.len())
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let s: f64 = (k..p.len()).map(|m| binomial(m, k) * p[m]).sum();
                Complex64::new(sign * s, 0.0)
            })
            .collect();
        Self { coefficients }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * lambda + c)
    }

    /// `Q(0) = 1`, `Q(1) = p(0) ∈ [0, 1]`, and real coefficients.
    pub fn check(&self) -> Result<()> {
        let c0 = self.coefficients.first().copied().unwrap_or_default();
        if (c0 - 1.0).norm() > IMAG_TOL {
            return Err(Error::Invariant(format!("Q(0) = {c0}, expected 1")));
        }
        let scale = self.coefficients.iter().map(|c| c.norm()).fold(1.0, f64::max);
        if let Some(c) = self.coefficients.iter().find(|c| c.im.abs() > IMAG_TOL * scale) {
            return Err(Error::Invariant(format!("complex coefficient {c} in Q")));
        }
        let q1 = self.eval(Complex64::new(1.0, 0.0)).re;
        if !(-1e-9..=1.0 + 1e-9).contains(&q1) {
            return Err(Error::Invariant(format!("Q(1) = p(0) = {q1} outside [0, 1]")));
        }
        Ok(())
    }

    /// `p(m) = (-1)^m Σ_{k≥m} C(k, m) c_k`, the coefficients of `Q(1-s)`.
    ///
    /// The alternating sum loses roughly `log10 C(P, P/2)` digits; fine for
    /// the low-degree polynomials produced from closed forms.
    pub fn to_distribution(&self) -> Result<CountingDistribution> {
        self.check()?;
        let c = &self.coefficients;
        let p = (0..c.len())
            .map(|m| {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * (m..c.len()).map(|k| binomial(k, m) * c[k].re).sum::<f64>()
            })
            .collect();
        CountingDistribution::from_probabilities(p)
    }
}

/// `C(n, k)` as a float; zero outside `0 ≤ k ≤ n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `C(n, k)` with signed arguments; zero whenever either argument is negative
/// or `k > n`.
pub fn binomial_signed(n: i64, k: i64) -> f64 {
    if n < 0 || k < 0 || k > n {
        0.0
    } else {
        binomial(n as usize, k as usize)
    }
}
