//! Product coherent states: Poissonian counting with mean `α†Aα`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::distribution::{CountingDistribution, NEGATIVE_TOL};
use crate::error::{Error, Result};

/// `μ = Σ_ij ᾱ_i A_ij α_j`, checked to be real and non-negative.
pub fn bilinear_mean(a: &DMatrix<Complex64>, amplitudes: &[Complex64]) -> Result<f64> {
    if a.nrows() != a.ncols() || a.nrows() != amplitudes.len() {
        return Err(Error::Domain(format!(
            "{} amplitudes for a {}x{} correlation matrix",
            amplitudes.len(),
            a.nrows(),
            a.ncols()
        )));
    }
    if let Some(z) = amplitudes.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain(format!("amplitude {z} is not finite")));
    }
    let n = amplitudes.len();
    let mut mu = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for i in 0..n {
        for j in 0..n {
            let term = amplitudes[i].conj() * a[(i, j)] * amplitudes[j];
            mu += term;
            scale += term.norm();
        }
    }
    let tol = NEGATIVE_TOL * scale.max(1.0);
    if mu.im.abs() > tol {
        return Err(Error::Invariant(format!("α†Aα = {mu} is not real")));
    }
    if mu.re < -tol {
        return Err(Error::Invariant(format!("α†Aα = {} is negative", mu.re)));
    }
    Ok(mu.re.max(0.0))
}

pub fn coherent_probabilities(a: &DMatrix<Complex64>, amplitudes: &[Complex64]) -> Result<CountingDistribution> {
    CountingDistribution::poisson(bilinear_mean(a, amplitudes)?)
}

/// Mean diagonal and mean nearest-neighbour coupling `Re A_{i,i+1}` along the
/// site order, i.e. bulk values for a chain.
pub fn uniform_diagonal_and_nn(a: &DMatrix<Complex64>) -> (f64, f64) {
    let n = a.nrows();
    let ad = (0..n).map(|i| a[(i, i)].re).sum::<f64>() / n as f64;
    let ann = if n > 1 { (0..n - 1).map(|i| a[(i, i + 1)].re).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
    (ad, ann)
}

/// `(N/2) A_d (|β|²+|γ|²) + 2N A_NN Re(β̄γ)` for a chain alternating between
/// `β` and `γ`, counting `N` bonds (bulk).
pub fn supersolid_mean_nn(a: &DMatrix<Complex64>, beta: Complex64, gamma: Complex64, n: usize) -> f64 {
    let (ad, ann) = uniform_diagonal_and_nn(a);
    let n = n as f64;
    0.5 * n * ad * (beta.norm_sqr() + gamma.norm_sqr()) + 2.0 * n * ann * (beta.conj() * gamma).re
}

/// `N |α|² (A_d + 2 A_NN)` for a homogeneous chain.
pub fn homogeneous_mean_nn(a: &DMatrix<Complex64>, alpha: Complex64, n: usize) -> f64 {
    let (ad, ann) = uniform_diagonal_and_nn(a);
    n as f64 * alpha.norm_sqr() * (ad + 2.0 * ann)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn two_site_mean() {
        let a = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.3), c(0.3), c(0.5)]);
        let d = coherent_probabilities(&a, &[c(1.0), c(1.0)]).unwrap();
        assert!((d.mean - 1.6).abs() < 1e-15);
        assert!((d.probabilities[0] - (-1.6f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn homogeneous_diagonal() {
        let n = 10;
        let a = DMatrix::from_diagonal_element(n, n, c(0.2));
        let alpha = Complex64::new(0.6, 0.8);
        let d = coherent_probabilities(&a, &vec![alpha; n]).unwrap();
        assert!((d.mean - n as f64 * alpha.norm_sqr() * 0.2).abs() < 1e-14);
        assert_eq!(d.mean, d.variance);
    }

    #[test]
    fn vacuum_amplitudes() {
        let a = DMatrix::from_diagonal_element(3, 3, c(0.4));
        let d = coherent_probabilities(&a, &[c(0.0); 3]).unwrap();
        assert_eq!(d.probabilities, vec![1.0]);
    }

    #[test]
    fn negative_mean_is_an_invariant_error() {
        let a = DMatrix::from_diagonal_element(2, 2, c(-0.4));
        assert!(matches!(coherent_probabilities(&a, &[c(1.0); 2]), Err(Error::Invariant(_))));
    }

    #[test]
    fn equal_amplitudes_reduce_supersolid_to_homogeneous() {
        let a = DMatrix::from_fn(6, 6, |i, j| c(if i == j { 0.2 } else if i.abs_diff(j) == 1 { 0.05 } else { 0.0 }));
        let b = Complex64::new(0.7, 0.0);
        assert!((supersolid_mean_nn(&a, b, b, 6) - homogeneous_mean_nn(&a, b, 6)).abs() < 1e-15);
        let (beta, gamma) = (c(0.5f64.sqrt()), c(1.5f64.sqrt()));
        assert!(supersolid_mean_nn(&a, beta, gamma, 6) < homogeneous_mean_nn(&a, c(1.0), 6));
    }
}
