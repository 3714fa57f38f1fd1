#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-ish unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    g.qr().q()
}

/// `U diag(e) U†` with eigenvalues drawn uniformly from `[lo, hi]`.
pub fn random_psd(n: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let u = random_unitary(n, rng);
    let e = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| Complex64::new(rng.random_range(lo..hi), 0.0)));
    let a = &u * e * u.adjoint();
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
