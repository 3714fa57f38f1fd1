//! Equal-weight superposition of all placements of two atoms on four sites:
//! the shipped expansion against the alternative readings of the pair term,
//! each measured against the brute-force oracle.

use atomcount::counting::{superposition_probabilities, KInterpretation};
use atomcount::oracle::interpretation_report;
use nalgebra::DMatrix;
use num_complex::Complex64;

fn main() -> atomcount::Result<()> {
    let a = DMatrix::from_fn(4, 4, |i, j| {
        let d = i.abs_diff(j) as f64;
        Complex64::new(0.3 * (-0.7 * d).exp(), 0.02 * (i as f64 - j as f64))
    });
    let dist = superposition_probabilities(&a, 2, 4, KInterpretation::Complete)?;
    println!("p(m) = {:?}", dist.probabilities.iter().map(|p| format!("{p:.6}")).collect::<Vec<_>>());
    for d in interpretation_report(&a, 2, 4)? {
        println!("{:<14} max |Q - Q_oracle| = {:.2e}", format!("{:?}", d.interpretation), d.max_abs_error);
    }
    Ok(())
}
