//! On-site and interference elements of `A` for a vertical chain as the
//! detector height grows from much narrower to much wider than the cloud.

use atomcount::lattice::{DetectorBox, LatticeGeometry, PhysicalParams};
use atomcount::propagation::{correlation_matrix, PropagationMode};

fn main() -> atomcount::Result<()> {
    let params = PhysicalParams::default();
    let chain = LatticeGeometry::vertical_chain(12, LatticeGeometry::DEFAULT_SPACING)?;
    let i = 5;
    println!("{:>10} {:>12} {:>12} {:>12} {:>12}", "dz [m]", "A_ii", "|A_i,i+1|", "|A_i,i+2|", "|A_i,i+3|");
    for dz in [2e-5, 1e-4, 2e-4, 1e-3, 2e-3, 1e-2] {
        let det = DetectorBox::below(0.01, [0.01, 0.01, dz], 1.0)?;
        let a = correlation_matrix(&chain, &det, &params, PropagationMode::Exact)?;
        let e = &a.entries;
        println!(
            "{dz:>10.0e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            e[(i, i)].re,
            e[(i, i + 1)].norm(),
            e[(i, i + 2)].norm(),
            e[(i, i + 3)].norm()
        );
    }
    let det = DetectorBox::below(0.01, [0.01, 0.01, 2e-5], 1.0)?;
    let a = correlation_matrix(&chain, &det, &params, PropagationMode::Exact)?;
    println!("expanded width ω_t = {:.3} mm after {:.1} ms", a.context.width * 1e3, a.context.t_d * 1e3);
    Ok(())
}
