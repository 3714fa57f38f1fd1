//! Two insulators with the same atom number but different occupation
//! patterns: distinguishable under a thin detector, identical under a tall one.

use atomcount::counting::{state_probabilities, total_variation, CountingOptions, KInterpretation};
use atomcount::lattice::{make_pattern, DetectorBox, LatticeGeometry, PatternKind, PhysicalParams};
use atomcount::propagation::{correlation_matrix, PropagationMode};

fn main() -> atomcount::Result<()> {
    let chain = LatticeGeometry::vertical_chain(12, LatticeGeometry::DEFAULT_SPACING)?;
    let checker = make_pattern(PatternKind::Checkerboard, &chain)?;
    let blocks = make_pattern("blocks:3".parse()?, &chain)?;
    let opts = CountingOptions::exact();
    for (label, dxy, dz) in [("thin", 1e-3, 2e-5), ("thin, narrow", 2e-4, 2e-5), ("tall", 1e-3, 2e-2)] {
        let det = DetectorBox::below(0.01, [dxy, dxy, dz], 1.0)?;
        let a = correlation_matrix(&chain, &det, &PhysicalParams::default(), PropagationMode::Exact)?.entries;
        let p = state_probabilities(&a, &checker, &opts, KInterpretation::default())?;
        let q = state_probabilities(&a, &blocks, &opts, KInterpretation::default())?;
        println!(
            "{label:<13} means {:.5} / {:.5}  variances {:.5} / {:.5}  TV {:.3e}",
            p.mean,
            q.mean,
            p.variance,
            q.variance,
            total_variation(&p, &q)
        );
    }
    Ok(())
}
