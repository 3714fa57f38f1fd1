//! Superfluid and supersolid chains give Poisson counts; the supersolid
//! mean is lowered by the staggered amplitudes.

use atomcount::counting::{bilinear_mean, coherent_probabilities, homogeneous_mean_nn, supersolid_mean_nn};
use atomcount::lattice::{make_supersolid, DetectorBox, LatticeGeometry, ManyBodyState, PhysicalParams};
use atomcount::propagation::{correlation_matrix, PropagationMode};
use num_complex::Complex64;

fn main() -> atomcount::Result<()> {
    let chain = LatticeGeometry::vertical_chain(12, LatticeGeometry::DEFAULT_SPACING)?;
    let det = DetectorBox::below(0.01, [0.01, 0.01, 2e-5], 1.0)?;
    let a = correlation_matrix(&chain, &det, &PhysicalParams::default(), PropagationMode::Exact)?.entries;

    let alpha = Complex64::new(1.0, 0.0);
    let (beta, gamma) = (Complex64::new(0.5f64.sqrt(), 0.0), Complex64::new(1.5f64.sqrt(), 0.0));
    let ManyBodyState::CoherentProduct { amplitudes } = make_supersolid(&chain, beta, gamma) else { unreachable!() };

    let sf = coherent_probabilities(&a, &[alpha; 12])?;
    let ss = coherent_probabilities(&a, &amplitudes)?;
    println!("superfluid  mean {:.5} (nearest-neighbour estimate {:.5})", sf.mean, homogeneous_mean_nn(&a, alpha, 12));
    println!("supersolid  mean {:.5} (nearest-neighbour estimate {:.5})", ss.mean, supersolid_mean_nn(&a, beta, gamma, 12));
    assert_eq!(ss.mean, bilinear_mean(&a, &amplitudes)?);
    println!(" m  p_sf(m)   p_ss(m)");
    for m in 0..8 {
        println!("{m:>2}  {:.5}   {:.5}", sf.get(m), ss.get(m));
    }
    Ok(())
}
