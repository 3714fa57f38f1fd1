//! Exact propagation against the far-field approximation for the same
//! detector, element by element.

use atomcount::lattice::{DetectorBox, LatticeGeometry, PhysicalParams};
use atomcount::propagation::{correlation_matrix, PropagationMode};

fn main() -> atomcount::Result<()> {
    let params = PhysicalParams::default();
    let chain = LatticeGeometry::vertical_chain(6, LatticeGeometry::DEFAULT_SPACING)?;
    for z0 in [0.005, 0.01, 0.05] {
        let det = DetectorBox::below(z0, [1e-3, 1e-3, 5e-5], 1.0)?;
        let exact = correlation_matrix(&chain, &det, &params, PropagationMode::Exact)?;
        let far = correlation_matrix(&chain, &det, &params, PropagationMode::FarField)?;
        let worst = (&exact.entries - &far.entries).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let scale = exact.entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        println!("z0 = {z0:<6} max |A_exact - A_far| = {worst:.3e} (largest element {scale:.3e})");
    }
    Ok(())
}
