//! Scenarios from text: parse, compute, and write the plot data into a
//! temporary directory.

use atomcount::scenario::{compute, write_outputs, Scenario};

const SCENARIO: &str = r#"
name = "demo"
lattice.dims = [1, 1, 8]
detector.center_m = [0.0, 0.0, 0.01]
detector.edges_m = [2e-3, 2e-3, 1e-3]
detector.kappa = 0.9
state.mi.kind = "unit"
state.cb.kind = "pattern"
state.cb.pattern = "checkerboard"
state.sf.kind = "coherent"
state.sf.alpha = [0.6, 0.8]
sweep.axis = "z0"
sweep.values_m = [0.005, 0.01, 0.02]
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario::parse(SCENARIO)?;
    let report = compute(&scenario)?;
    for point in &report.points {
        for s in &point.states {
            println!("z0 = {:<6} {:<3} mean {:.4} variance {:.4}", point.axis_value.unwrap(), s.label, s.distribution.mean, s.distribution.variance);
        }
    }
    let dir = std::env::temp_dir().join("atomcount-demo");
    let files = write_outputs(&scenario, &report, &dir)?;
    for f in files.paths {
        println!("wrote {}", f.display());
    }
    Ok(())
}
