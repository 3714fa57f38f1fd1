//! Joint counts at two detectors placed symmetrically about the lattice,
//! for a Mott insulator and a superfluid, as the separation grows.

use atomcount::counting::{joint_coherent_probabilities, joint_fock_probabilities};
use atomcount::lattice::{DetectorBox, LatticeGeometry, PhysicalParams};
use atomcount::propagation::{correlation_matrix, PropagationMode};
use num_complex::Complex64;

fn main() -> atomcount::Result<()> {
    let params = PhysicalParams::default();
    let plane = LatticeGeometry::new([3, 3, 1], LatticeGeometry::DEFAULT_SPACING)?;
    println!("{:>6} {:>9} {:>11} {:>11} {:>9}", "xd [m]", "mean", "corr", "pearson", "sf corr");
    for xd in [0.0, 0.005, 0.009, 0.01, 0.011, 0.015] {
        let d1 = DetectorBox::new([xd, 0.0, 0.01], [0.02, 0.02, 2e-3], 0.5)?;
        let d2 = DetectorBox::new([-xd, 0.0, 0.01], [0.02, 0.02, 2e-3], 0.5)?;
        let a1 = correlation_matrix(&plane, &d1, &params, PropagationMode::Exact)?.entries;
        let a2 = correlation_matrix(&plane, &d2, &params, PropagationMode::Exact)?.entries;
        let mi = joint_fock_probabilities(&a1, &a2, &[1; 9])?.moments();
        let sf = joint_coherent_probabilities(&a1, &a2, &[Complex64::new(1.0, 0.0); 9])?.moments();
        let fmt = |r: atomcount::Result<f64>| r.map(|v| format!("{v:.4e}")).unwrap_or_else(|_| "undefined".into());
        println!("{xd:>6} {:>9.4} {:>11} {:>11} {:>9}", mi.mean[0], fmt(mi.corr()), fmt(mi.pearson()), fmt(sf.corr()));
    }
    Ok(())
}
