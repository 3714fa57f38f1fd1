//! Built-in scenarios. The lattice spacing is the crate default throughout.

use super::Scenario;
use crate::error::{domain, Result};

const FIGURES: [&str; 7] = [
    include_str!("../../scenarios/fig1.cfg"),
    include_str!("../../scenarios/fig2.cfg"),
    include_str!("../../scenarios/fig3.cfg"),
    include_str!("../../scenarios/fig4.cfg"),
    include_str!("../../scenarios/fig5.cfg"),
    include_str!("../../scenarios/fig6.cfg"),
    include_str!("../../scenarios/fig7.cfg"),
];

/// Small scenarios that the oracle can check in full.
pub const VERIFY_PRESETS: [(&str, &str); 3] = [
    ("fig6", include_str!("../../scenarios/verify_fig6.cfg")),
    ("fig4", include_str!("../../scenarios/verify_fig4.cfg")),
    ("sf", include_str!("../../scenarios/verify_sf.cfg")),
];

pub fn figure_text(n: usize) -> Result<&'static str> {
    match n {
        1..=7 => Ok(FIGURES[n - 1]),
        _ => domain(format!("no figure preset {n}, expected 1..7")),
    }
}

pub fn figure(n: usize) -> Result<Scenario> {
    Scenario::parse(figure_text(n)?)
}

pub fn verify_preset(name: &str) -> Result<Scenario> {
    match VERIFY_PRESETS.iter().find(|(k, _)| *k == name) {
        Some((_, text)) => Scenario::parse(text),
        None => domain(format!("no verification preset `{name}`")),
    }
}
