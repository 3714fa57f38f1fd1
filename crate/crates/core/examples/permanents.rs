//! Permanents: plain values, the pencil `per(B + sC)` and timing of the
//! parallel Gray-code evaluation.

use std::time::Instant;

use atomcount::counting::{permanent, permanent_linear_pencil};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn main() -> atomcount::Result<()> {
    let ones = DMatrix::from_element(6, 6, Complex64::new(1.0, 0.0));
    println!("per(J_6) = {} (6! = 720)", permanent(&ones)?.re);

    let b = DMatrix::identity(3, 3);
    let c = DMatrix::from_fn(3, 3, |i, j| Complex64::new(if i == j { 0.5 } else { 0.1 }, 0.0));
    let coeffs = permanent_linear_pencil(&b, &c)?;
    println!("per(I + sC) coefficients: {:?}", coeffs.iter().map(|z| z.re).collect::<Vec<_>>());

    for n in [12, 16, 20] {
        let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(((i * 31 + j * 17) % 7) as f64 / 7.0, 0.0));
        let t = Instant::now();
        let p = permanent(&m)?;
        println!("n = {n:>2}: per = {:.6e} in {:?}", p.re, t.elapsed());
    }
    Ok(())
}
