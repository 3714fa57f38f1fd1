//! `<ψ| exp(H) |ψ>` for a Hermitian many-body `H`: dense eigendecomposition
//! for small sectors, Lanczos with full reorthogonalisation for large ones.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) fn expectation_dense(h: &DMatrix<Complex64>, psi: &[Complex64]) -> f64 {
    let eig = h.clone().symmetric_eigen();
    let v = DVector::from_column_slice(psi);
    let coeffs = eig.eigenvectors.adjoint() * v;
    eig.eigenvalues.iter().zip(coeffs.iter()).map(|(&l, c)| l.exp() * c.norm_sqr()).sum()
}

const MAX_LANCZOS: usize = 400;

/// Krylov approximation `|ψ|² (e^T)_{00}`; stops when successive estimates
/// agree to `1e-15` relative or the Krylov space becomes invariant.
pub(crate) fn expectation_lanczos<F>(apply: F, psi: &[Complex64]) -> Result<f64>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    let d = psi.len();
    let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if norm2 == 0.0 {
        return Ok(0.0);
    }
    let norm = norm2.sqrt();
    let mut basis: Vec<Vec<Complex64>> = vec![psi.iter().map(|z| z / norm).collect()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); d];
    let mut previous = f64::NAN;
    for k in 0..MAX_LANCZOS.min(d) {
        apply(&basis[k], &mut w);
        let a: f64 = basis[k].iter().zip(&w).map(|(v, x)| (v.conj() * x).re).sum();
        alpha.push(a);
        // two passes of Gram–Schmidt against the whole basis
        for _ in 0..2 {
            for v in &basis {
                let c: Complex64 = v.iter().zip(&w).map(|(v, x)| v.conj() * x).sum();
                for (x, vv) in w.iter_mut().zip(v) {
                    *x -= c * vv;
                }
            }
        }
        let b = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let estimate = norm2 * tridiagonal_exp00(&alpha, &beta);
        let invariant = b <= 1e-13 * alpha.iter().map(|a| a.abs()).fold(1.0, f64::max);
        if invariant || (k >= 4 && (estimate - previous).abs() <= 1e-15 * estimate.abs()) {
            return Ok(estimate);
        }
        previous = estimate;
        beta.push(b);
        basis.push(w.iter().map(|z| z / b).collect());
    }
    Err(Error::Invariant(format!("Lanczos exponential did not converge in {MAX_LANCZOS} steps")))
}

fn tridiagonal_exp00(alpha: &[f64], beta: &[f64]) -> f64 {
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i.abs_diff(j) == 1 {
            beta[i.min(j)]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    (0..k).map(|m| eig.eigenvalues[m].exp() * eig.eigenvectors[(0, m)].powi(2)).sum()
}
