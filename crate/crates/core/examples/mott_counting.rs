//! Counting distribution of a unit-filled chain. With a detector that
//! suppresses interference the result is binomial in the on-site weight.

use atomcount::counting::{binomial, fock_probabilities_with, CountingOptions};
use atomcount::lattice::{DetectorBox, LatticeGeometry, PhysicalParams};
use atomcount::propagation::{correlation_matrix, PropagationMode};

fn main() -> atomcount::Result<()> {
    let chain = LatticeGeometry::vertical_chain(10, LatticeGeometry::DEFAULT_SPACING)?;
    let det = DetectorBox::below(0.01, [1e-3, 1e-3, 2e-3], 1.0)?;
    let a = correlation_matrix(&chain, &det, &PhysicalParams::default(), PropagationMode::Exact)?;
    let dist = fock_probabilities_with(&a.entries, &[1; 10], &CountingOptions::exact())?;

    let ad = a.diagonal().iter().sum::<f64>() / 10.0;
    println!("mean A_ii = {ad:.5}, max off-diagonal ratio = {:.2e}", a.max_offdiagonal_ratio());
    println!(" m  p(m)          binomial");
    for (m, p) in dist.probabilities.iter().enumerate() {
        let b = binomial(10, m) * ad.powi(m as i32) * (1.0 - ad).powi(10 - m as i32);
        println!("{m:>2}  {p:.6e}  {b:.6e}");
    }
    println!("mean {:.5}, variance {:.5}, Fano {:.4}", dist.mean, dist.variance, dist.fano_factor());
    Ok(())
}
