//! Matrix permanents by Ryser's inclusion–exclusion formula.
//!
//! `per(M) = (-1)^k Σ_{S ⊆ cols} (-1)^{|S|} Π_i Σ_{j∈S} M_ij`, visiting the
//! subsets in Gray-code order so each step adds or removes one column from the
//! running row sums. Subsets are split into a fixed number of blocks by their
//! highest columns; blocks run in parallel and are summed in block order, so
//! the result does not depend on the thread count.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest permanent evaluated, `O(2^k k)` work.
pub const MAX_PERMANENT_DIM: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn permanent(m: &DMatrix<Complex64>) -> Result<Complex64> {
    if m.nrows() != m.ncols() {
        return Err(Error::Domain(format!("permanent needs a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let k = m.nrows();
    if k > MAX_PERMANENT_DIM {
        return Err(Error::Capacity { what: "permanent dimension", got: k, limit: MAX_PERMANENT_DIM });
    }
    let rows: Vec<Complex64> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|ij| m[ij]).collect();
    Ok(ryser(&rows, k))
}

/// Permanent of a row-major `k x k` matrix. No capacity check.
pub(crate) fn ryser(rows: &[Complex64], k: usize) -> Complex64 {
    match k {
        0 => return ONE,
        1 => return rows[0],
        2 => return rows[0] * rows[3] + rows[1] * rows[2],
        _ => {}
    }
    // columns stored contiguously for the Gray-code update
    let cols: Vec<Complex64> = (0..k).flat_map(|j| (0..k).map(move |i| rows[i * k + j])).collect();
    let high = block_bits(k);
    let low = k - high;
    let total: Complex64 = (0..1usize << high)
        .into_par_iter()
        .map(|block| ryser_block(&cols, k, low, block))
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    if k % 2 == 0 {
        total
    } else {
        -total
    }
}

fn block_bits(k: usize) -> usize {
    if k >= 14 {
        6
    } else if k >= 8 {
        3
    } else {
        0
    }
}

/// Signed sum over the subsets whose top `k - low` columns equal `block`.
fn ryser_block(cols: &[Complex64], k: usize, low: usize, block: usize) -> Complex64 {
    let mut sums = vec![ZERO; k];
    let mut size = 0usize;
    for h in 0..(k - low) {
        if block >> h & 1 == 1 {
            let col = &cols[(low + h) * k..(low + h + 1) * k];
            for (s, c) in sums.iter_mut().zip(col) {
                *s += c;
            }
            size += 1;
        }
    }
    let term = |sums: &[Complex64], size: usize| {
        let p: Complex64 = sums.iter().product();
        if size % 2 == 0 {
            p
        } else {
            -p
        }
    };
    let mut acc = if size == 0 { ZERO } else { term(&sums, size) };
    let mut member = vec![false; low];
    for g in 1usize..(1usize << low) {
        let j = g.trailing_zeros() as usize;
        let col = &cols[j * k..(j + 1) * k];
        if member[j] {
            for (s, c) in sums.iter_mut().zip(col) {
                *s -= c;
            }
            size -= 1;
        } else {
            for (s, c) in sums.iter_mut().zip(col) {
                *s += c;
            }
            size += 1;
        }
        member[j] = !member[j];
        acc += term(&sums, size);
    }
    acc
}

/// Coefficients of the polynomial `per(B + sC)` in `s`, by Ryser's formula
/// with polynomial row sums. `O(2^k k²)`; used to cross-check the
/// node-evaluation route.
pub fn permanent_linear_pencil(b: &DMatrix<Complex64>, c: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let k = b.nrows();
    if b.ncols() != k || c.shape() != b.shape() {
        return Err(Error::Domain("pencil matrices must be square and of equal size".into()));
    }
    if k > MAX_PERMANENT_DIM {
        return Err(Error::Capacity { what: "permanent dimension", got: k, limit: MAX_PERMANENT_DIM });
    }
    if k == 0 {
        return Ok(vec![ONE]);
    }
    let high = block_bits(k);
    let low = k - high;
    let blocks: Vec<Vec<Complex64>> = (0..1usize << high)
        .into_par_iter()
        .map(|block| {
            let mut acc = vec![ZERO; k + 1];
            for g in 0..(1usize << low) {
                let subset = g | (block << low);
                if subset == 0 {
                    continue;
                }
                let mut poly = vec![ZERO; k + 1];
                poly[0] = ONE;
                for i in 0..k {
                    let (mut r0, mut r1) = (ZERO, ZERO);
                    for j in 0..k {
                        if subset >> j & 1 == 1 {
                            r0 += b[(i, j)];
                            r1 += c[(i, j)];
                        }
                    }
                    for d in (0..=i + 1).rev() {
                        let lower = if d > 0 { poly[d - 1] * r1 } else { ZERO };
                        poly[d] = poly[d] * r0 + lower;
                    }
                }
                let odd = subset.count_ones() % 2 == 1;
                for (a, p) in acc.iter_mut().zip(&poly) {
                    if odd {
                        *a -= p;
                    } else {
                        *a += p;
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = vec![ZERO; k + 1];
    for block in blocks {
        for (t, v) in total.iter_mut().zip(block) {
            *t += v;
        }
    }
    if k % 2 == 1 {
        for t in &mut total {
            *t = -*t;
        }
    }
    Ok(total)
}

/// `M₊(A, k)`: sum of the permanents of all `k x k` principal submatrices,
/// for `k = 0..=n`, by explicit subset enumeration.
pub fn principal_permanent_sums(a: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    if n > 20 {
        return Err(Error::Capacity { what: "principal subset enumeration", got: n, limit: 20 });
    }
    let mut sums = vec![ZERO; n + 1];
    for subset in 0usize..(1usize << n) {
        let idx: Vec<usize> = (0..n).filter(|&i| subset >> i & 1 == 1).collect();
        let k = idx.len();
        let rows: Vec<Complex64> = idx.iter().flat_map(|&i| idx.iter().map(move |&j| a[(i, j)])).collect();
        sums[k] += ryser(&rows, k);
    }
    Ok(sums)
}
