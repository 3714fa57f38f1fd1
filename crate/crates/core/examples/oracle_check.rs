//! Generating function from the permanent formula against explicit
//! operator algebra in the truncated Fock space.

use atomcount::counting::{fock_probabilities_with, CountingOptions};
use atomcount::lattice::ManyBodyState;
use atomcount::oracle::{oracle_distribution, FockOracle};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn main() -> atomcount::Result<()> {
    let a = DMatrix::from_fn(5, 5, |i, j| {
        let x = 0.15 * (-(i.abs_diff(j) as f64).powi(2) / 3.0).exp();
        Complex64::new(x, if i < j { 0.01 } else if i > j { -0.01 } else { 0.0 })
    });
    let occupations = [1, 0, 1, 1, 0];
    let state = ManyBodyState::FockPattern { occupations: occupations.to_vec() };
    let ours = fock_probabilities_with(&a, &occupations, &CountingOptions::exact())?;
    let oracle = oracle_distribution(&a, &state)?;
    for m in 0..=3 {
        println!("p({m}) permanent {:.15}  oracle {:.15}", ours.get(m), oracle.get(m));
    }

    let mut fock = FockOracle::for_state(&state)?;
    for lambda in [0.25, 0.5, 1.0] {
        println!("Q({lambda}) = {:.15} vs {:.15}", ours.generating(lambda), fock.generating(&[(lambda, &a)], &state)?);
    }
    Ok(())
}
