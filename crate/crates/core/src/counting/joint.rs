//! Joint counting at two detectors.
//!
//! `G(s, t) = per((I - A1' - A2') + sA1' + tA2') = Σ p(m, n) s^m t^n`,
//! sampled on the `(P+1)²` grid of roots of unity and inverted by a 2-D DFT.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::coherent::bilinear_mean;
use super::distribution::{CountingDistribution, JointDistribution, JointMoments};
use super::fock::{
    fock_covariance, fock_moments, inverse_dft, negligible_offdiagonal, occupied_block, root_of_unity, CountingOptions,
};
use super::permanent::ryser;
use crate::error::{Error, Result};
use crate::propagation::{eigenvalues, hermiticity_defect};

pub const MAX_JOINT_PARTICLES: usize = 18;

pub fn joint_fock_probabilities(
    a1: &DMatrix<Complex64>,
    a2: &DMatrix<Complex64>,
    occupations: &[u8],
) -> Result<JointDistribution> {
    joint_fock_probabilities_with(a1, a2, occupations, &CountingOptions::default())
}

pub fn joint_fock_probabilities_with(
    a1: &DMatrix<Complex64>,
    a2: &DMatrix<Complex64>,
    occupations: &[u8],
    options: &CountingOptions,
) -> Result<JointDistribution> {
    if a1.shape() != a2.shape() {
        return Err(Error::Domain(format!("detector matrices differ in shape: {:?} vs {:?}", a1.shape(), a2.shape())));
    }
    for (name, a) in [("first", a1), ("second", a2)] {
        require_hermitian_psd(name, a)?;
    }
    let b1 = occupied_block(a1, occupations)?;
    let b2 = occupied_block(a2, occupations)?;
    let p = b1.nrows();
    let n = p + 1;
    let ((m1, v1), (m2, v2)) = (fock_moments(&b1), fock_moments(&b2));
    let moments = scaled_moments(&b1, &b2, [m1, m2], [v1, v2]);
    if negligible_offdiagonal(&b1, options.offdiag_threshold) && negligible_offdiagonal(&b2, options.offdiag_threshold) {
        let table = trinomial_product(&b1, &b2);
        return JointDistribution::with_moments(table, moments);
    }
    if p > MAX_JOINT_PARTICLES {
        return Err(Error::Capacity { what: "occupied sites (joint)", got: p, limit: MAX_JOINT_PARTICLES });
    }
    // one representative of each conjugate pair (k,l) ~ (-k,-l)
    let partner = |k: usize, l: usize| ((n - k) % n, (n - l) % n);
    let canonical: Vec<(usize, usize)> =
        (0..n).flat_map(|k| (0..n).map(move |l| (k, l))).filter(|&(k, l)| (k, l) <= partner(k, l)).collect();
    let evaluated: Vec<Complex64> = canonical
        .par_iter()
        .map(|&(k, l)| {
            let (s, t) = (root_of_unity(k, n), root_of_unity(l, n));
            let mut rows = Vec::with_capacity(p * p);
            for i in 0..p {
                for j in 0..p {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    rows.push(delta + (s - 1.0) * b1[(i, j)] + (t - 1.0) * b2[(i, j)]);
                }
            }
            ryser(&rows, p)
        })
        .collect();
    let mut grid = DMatrix::<Complex64>::zeros(n, n);
    for (&(k, l), &v) in canonical.iter().zip(&evaluated) {
        grid[(k, l)] = v;
        let (pk, pl) = partner(k, l);
        grid[(pk, pl)] = v.conj();
    }
    // inverse DFT along both axes
    for k in 0..n {
        let row: Vec<Complex64> = grid.row(k).iter().copied().collect();
        for (l, v) in inverse_dft(&row).into_iter().enumerate() {
            grid[(k, l)] = v;
        }
    }
    for l in 0..n {
        let col: Vec<Complex64> = grid.column(l).iter().copied().collect();
        for (k, v) in inverse_dft(&col).into_iter().enumerate() {
            grid[(k, l)] = v;
        }
    }
    let scale = grid.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if let Some(z) = grid.iter().find(|z| z.im.abs() > 1e-9 * scale) {
        return Err(Error::Invariant(format!("joint coefficient {z} has a non-negligible imaginary part")));
    }
    let mut table = grid.map(|z| z.re);
    for m in 0..n {
        for k in 0..n {
            if m + k > p {
                if table[(m, k)].abs() > 1e-9 {
                    return Err(Error::Invariant(format!("p({m},{k}) = {:e} beyond the particle number", table[(m, k)])));
                }
                table[(m, k)] = 0.0;
            }
        }
    }
    JointDistribution::with_moments(table, moments)
}

/// The covariance is bilinear in the two blocks, so it is evaluated on
/// blocks scaled to unit size; far from the cloud the unscaled product
/// underflows long before the normalised covariance loses meaning.
fn scaled_moments(b1: &DMatrix<Complex64>, b2: &DMatrix<Complex64>, mean: [f64; 2], variance: [f64; 2]) -> JointMoments {
    let size = |b: &DMatrix<Complex64>| b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (t1, t2) = (size(b1), size(b2));
    if t1 == 0.0 || t2 == 0.0 {
        return JointMoments::new(mean, variance, 0.0);
    }
    let unit = fock_covariance(&b1.map(|z| z / t1), &b2.map(|z| z / t2));
    JointMoments {
        mean,
        variance,
        covariance: unit * t1 * t2,
        normalised_covariance: unit * (t1 / variance[0]) * (t2 / variance[1]),
    }
}

fn require_hermitian_psd(name: &str, a: &DMatrix<Complex64>) -> Result<()> {
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if hermiticity_defect(a) > 1e-10 * scale {
        return Err(Error::Domain(format!("{name} detector matrix is not Hermitian")));
    }
    let lowest = eigenvalues(a).into_iter().fold(f64::INFINITY, f64::min);
    if a.nrows() > 0 && lowest < -1e-10 * scale {
        return Err(Error::Domain(format!("{name} detector matrix is not positive semidefinite (eigenvalue {lowest:e})")));
    }
    Ok(())
}

/// Coefficients of `Π_i (1 - a_i - b_i + s a_i + t b_i)`.
fn trinomial_product(b1: &DMatrix<Complex64>, b2: &DMatrix<Complex64>) -> DMatrix<f64> {
    let p = b1.nrows();
    let mut table = DMatrix::zeros(p + 1, p + 1);
    table[(0, 0)] = 1.0;
    for i in 0..p {
        let (a, b) = (b1[(i, i)].re, b2[(i, i)].re);
        let mut next = DMatrix::zeros(p + 1, p + 1);
        for m in 0..=i {
            for k in 0..=(i - m) {
                let v = table[(m, k)];
                next[(m, k)] += v * (1.0 - a - b);
                next[(m + 1, k)] += v * a;
                next[(m, k + 1)] += v * b;
            }
        }
        table = next;
    }
    table
}

/// Product of the two Poissonian marginals; coherent states give
/// uncorrelated counts.
pub fn joint_coherent_probabilities(
    a1: &DMatrix<Complex64>,
    a2: &DMatrix<Complex64>,
    amplitudes: &[Complex64],
) -> Result<JointDistribution> {
    let first = CountingDistribution::poisson(bilinear_mean(a1, amplitudes)?)?;
    let second = CountingDistribution::poisson(bilinear_mean(a2, amplitudes)?)?;
    Ok(JointDistribution::independent(first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::fock::fock_probabilities_with;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn two_particle_table() {
        let a = DMatrix::from_diagonal_element(2, 2, c(0.25));
        for opts in [CountingOptions::default(), CountingOptions::exact()] {
            let j = joint_fock_probabilities_with(&a, &a, &[1, 1], &opts).unwrap();
            let expected = [((0, 0), 0.25), ((1, 0), 0.25), ((0, 1), 0.25), ((1, 1), 0.125), ((2, 0), 0.0625), ((0, 2), 0.0625)];
            for ((m, n), e) in expected {
                assert!((j.get(m, n) - e).abs() < 1e-14, "p({m},{n}) = {}", j.get(m, n));
            }
            assert!((j.probabilities.sum() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn marginals_match_single_detector() {
        let a1 = DMatrix::from_row_slice(3, 3, &[c(0.3), c(0.05), c(0.01), c(0.05), c(0.25), c(0.04), c(0.01), c(0.04), c(0.2)]);
        let a2 = DMatrix::from_row_slice(3, 3, &[c(0.2), c(-0.02), c(0.0), c(-0.02), c(0.3), c(0.01), c(0.0), c(0.01), c(0.35)]);
        let j = joint_fock_probabilities_with(&a1, &a2, &[1, 1, 1], &CountingOptions::exact()).unwrap();
        let single = fock_probabilities_with(&a1, &[1, 1, 1], &CountingOptions::exact()).unwrap();
        for m in 0..=3 {
            assert!((j.first.get(m) - single.get(m)).abs() < 1e-12);
        }
    }

    #[test]
    fn correlation_survives_underflowing_covariance() {
        let scale = 1e-170;
        let a1 = DMatrix::from_row_slice(2, 2, &[c(0.3), c(0.1), c(0.1), c(0.2)]);
        let a2 = DMatrix::from_row_slice(2, 2, &[c(0.1), c(-0.05), c(-0.05), c(0.25)]);
        let reference = joint_fock_probabilities(&a1, &a2, &[1, 1]).unwrap().moments();
        let tiny = joint_fock_probabilities(&a1.map(|z| z * scale), &a2.map(|z| z * scale), &[1, 1]).unwrap().moments();
        assert_eq!(tiny.covariance, 0.0);
        // to leading order in the scale, cov / (σ₁² σ₂²) -> -(Σ a_i b_i - Re tr A1A2) / (tr A1 tr A2)
        let limit = fock_covariance(&a1, &a2) / (0.5 * 0.35);
        assert!((tiny.corr().unwrap() - limit).abs() < 1e-12 * limit.abs());
        assert!(reference.corr().unwrap().is_finite());
    }

    #[test]
    fn rejects_non_psd() {
        let good = DMatrix::from_diagonal_element(2, 2, c(0.2));
        let bad = DMatrix::from_row_slice(2, 2, &[c(0.1), c(0.5), c(0.5), c(0.1)]);
        assert!(matches!(joint_fock_probabilities(&good, &bad, &[1, 1]), Err(Error::Domain(_))));
    }

    #[test]
    fn coherent_joint_is_uncorrelated() {
        let a1 = DMatrix::from_diagonal_element(3, 3, c(0.2));
        let a2 = DMatrix::from_diagonal_element(3, 3, c(0.2));
        let j = joint_coherent_probabilities(&a1, &a2, &[c(1.0); 3]).unwrap();
        assert_eq!(j.covariance, 0.0);
        for m in 0..5 {
            for n in 0..5 {
                assert_eq!(j.get(m, n), j.get(n, m));
            }
        }
    }
}
