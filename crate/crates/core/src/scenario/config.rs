//! Scenario files: flat TOML with dotted keys and SI unit suffixes.
//!
//! ```toml
//! name = "fig6"
//! mode = "exact"                       # or "far_field"
//! lattice.dims = [1, 1, 24]            # sites along x, y, z (z = gravity)
//! lattice.spacing_m = 5e-7
//! detector.center_m = [0.0, 0.0, 0.01] # z component is the fall distance z0
//! detector.edges_m = [1e-3, 1e-3, 2e-5]
//! detector.kappa = 1.0
//! state.checkerboard.kind = "pattern"
//! state.checkerboard.pattern = "checkerboard"
//! ```
//!
//! Every key is listed in the README; anything else is rejected.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Deserialize;

use crate::counting::{CountingOptions, Extraction, KInterpretation};
use crate::error::{domain, Error, Result};
use crate::lattice::{make_pattern, make_supersolid, DetectorBox, LatticeGeometry, ManyBodyState, PatternKind, PhysicalParams};
use crate::propagation::PropagationMode;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    #[serde(default)]
    mode: PropagationMode,
    #[serde(default)]
    params: RawParams,
    lattice: RawLattice,
    #[serde(default)]
    state: BTreeMap<String, RawState>,
    detector: RawDetector,
    detector2: Option<RawDetector>,
    sweep: Option<RawSweep>,
    #[serde(default)]
    counting: RawCounting,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    mass_kg: Option<f64>,
    hbar_js: Option<f64>,
    g_m_s2: Option<f64>,
    wannier_width_m: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    dims: [usize; 3],
    spacing_m: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    center_m: [f64; 3],
    edges_m: [f64; 3],
    kappa: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum RawComplex {
    Real(f64),
    Pair([f64; 2]),
}

impl From<RawComplex> for Complex64 {
    fn from(z: RawComplex) -> Self {
        match z {
            RawComplex::Real(re) => Complex64::new(re, 0.0),
            RawComplex::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum StateKind {
    Unit,
    Pattern,
    Coherent,
    Supersolid,
    Superposition,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    kind: StateKind,
    pattern: Option<String>,
    occupations: Option<Vec<u8>>,
    alpha: Option<RawComplex>,
    alpha_sq: Option<f64>,
    beta: Option<RawComplex>,
    beta_sq: Option<f64>,
    gamma: Option<RawComplex>,
    gamma_sq: Option<f64>,
    particles: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Fall distance of every detector.
    Z0,
    /// Vertical edge of every detector.
    Dz,
    /// Detectors at `(+x_d, 0, z0)` and `(-x_d, 0, z0)`.
    Xd,
}

impl SweepAxis {
    pub fn label(self) -> &'static str {
        match self {
            Self::Z0 => "z0",
            Self::Dz => "dz",
            Self::Xd => "xd",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: SweepAxis,
    values_m: Option<Vec<f64>>,
    start_m: Option<f64>,
    stop_m: Option<f64>,
    step_m: Option<f64>,
}

fn default_threshold() -> f64 {
    1e-6
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCounting {
    #[serde(default = "default_threshold")]
    offdiag_threshold: f64,
    #[serde(default)]
    onsite_only: bool,
    #[serde(default)]
    extraction: Extraction,
    #[serde(default)]
    interpretation: KInterpretation,
}

impl Default for RawCounting {
    fn default() -> Self {
        Self { offdiag_threshold: default_threshold(), onsite_only: false, extraction: Extraction::default(), interpretation: KInterpretation::default() }
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(default = "yes")]
    distributions: bool,
    #[serde(default)]
    a_elements: bool,
}

impl Default for RawOutput {
    fn default() -> Self {
        Self { distributions: true, a_elements: false }
    }
}

/// A labelled initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpec {
    pub label: String,
    pub state: ManyBodyState,
    /// `(β, γ)` for supersolid states, kept for the nearest-neighbour means.
    pub supersolid: Option<(Complex64, Complex64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingSettings {
    pub options: CountingOptions,
    /// Drop every off-diagonal element of `A` before counting: the
    /// large-detector limit where only on-site correlations survive.
    pub onsite_only: bool,
    pub interpretation: KInterpretation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputSettings {
    pub distributions: bool,
    pub a_elements: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: PhysicalParams,
    pub geometry: LatticeGeometry,
    pub states: Vec<StateSpec>,
    pub detector: DetectorBox,
    pub detector2: Option<DetectorBox>,
    pub mode: PropagationMode,
    pub sweep: Option<Sweep>,
    pub counting: CountingSettings,
    pub output: OutputSettings,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Domain(format!("scenario: {}", e.message())))?;
        build(raw)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Domain(format!("cannot read scenario {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sweep values, or a single `None` point.
    pub fn points(&self) -> Vec<Option<f64>> {
        match &self.sweep {
            Some(s) => s.values.iter().map(|&v| Some(v)).collect(),
            None => vec![None],
        }
    }

    /// Detectors at one sweep point.
    pub fn detectors_at(&self, value: Option<f64>) -> Result<(DetectorBox, Option<DetectorBox>)> {
        let (mut d1, mut d2) = (self.detector, self.detector2);
        if let (Some(sweep), Some(v)) = (&self.sweep, value) {
            match sweep.axis {
                SweepAxis::Z0 => {
                    d1.center[2] = v;
                    if let Some(d) = d2.as_mut() {
                        d.center[2] = v;
                    }
                }
                SweepAxis::Dz => {
                    d1.edges[2] = v;
                    if let Some(d) = d2.as_mut() {
                        d.edges[2] = v;
                    }
                }
                SweepAxis::Xd => {
                    d1.center[0] = v;
                    if let Some(d) = d2.as_mut() {
                        d.center[0] = -v;
                    }
                }
            }
        }
        d1.validate()?;
        if let Some(d) = &d2 {
            d.validate()?;
        }
        Ok((d1, d2))
    }
}

fn build(raw: RawScenario) -> Result<Scenario> {
    if raw.name.is_empty() || raw.name.contains(['/', '\\']) {
        return domain(format!("scenario name `{}` must be a plain non-empty word", raw.name));
    }
    let defaults = PhysicalParams::default();
    let params = PhysicalParams {
        mass: raw.params.mass_kg.unwrap_or(defaults.mass),
        hbar: raw.params.hbar_js.unwrap_or(defaults.hbar),
        g: raw.params.g_m_s2.unwrap_or(defaults.g),
        wannier_width: raw.params.wannier_width_m.unwrap_or(defaults.wannier_width),
    };
    let geometry = LatticeGeometry::new(raw.lattice.dims, raw.lattice.spacing_m.unwrap_or(LatticeGeometry::DEFAULT_SPACING))?;
    params.validate_against(&geometry)?;
    let detector = DetectorBox::new(raw.detector.center_m, raw.detector.edges_m, raw.detector.kappa)?;
    let detector2 = raw.detector2.map(|d| DetectorBox::new(d.center_m, d.edges_m, d.kappa)).transpose()?;
    let mut states = Vec::with_capacity(raw.state.len());
    for (label, s) in raw.state {
        states.push(build_state(label, s, &geometry)?);
    }
    let sweep = raw.sweep.map(build_sweep).transpose()?;
    if let Some(s) = &sweep {
        if s.axis == SweepAxis::Xd && detector2.is_none() {
            return domain("sweep.axis = \"xd\" needs a second detector");
        }
    }
    if !(raw.counting.offdiag_threshold >= 0.0) {
        return domain("counting.offdiag_threshold must be non-negative");
    }
    let counting = CountingSettings {
        options: CountingOptions {
            offdiag_threshold: Some(raw.counting.offdiag_threshold),
            extraction: raw.counting.extraction,
        },
        onsite_only: raw.counting.onsite_only,
        interpretation: raw.counting.interpretation,
    };
    if raw.output.a_elements && geometry.chain_axis().is_none() {
        return domain("output.a_elements needs a one-dimensional lattice");
    }
    let scenario = Scenario {
        name: raw.name,
        params,
        geometry,
        states,
        detector,
        detector2,
        mode: raw.mode,
        sweep,
        counting,
        output: OutputSettings { distributions: raw.output.distributions, a_elements: raw.output.a_elements },
    };
    for point in scenario.points() {
        scenario.detectors_at(point)?;
    }
    Ok(scenario)
}

fn amplitude(value: Option<RawComplex>, squared: Option<f64>, name: &str) -> Result<Option<Complex64>> {
    match (value, squared) {
        (Some(_), Some(_)) => domain(format!("give either {name} or {name}_sq, not both")),
        (Some(z), None) => Ok(Some(z.into())),
        (None, Some(s)) if s >= 0.0 => Ok(Some(Complex64::new(s.sqrt(), 0.0))),
        (None, Some(s)) => domain(format!("{name}_sq must be non-negative, got {s}")),
        (None, None) => Ok(None),
    }
}

fn build_state(label: String, raw: RawState, geometry: &LatticeGeometry) -> Result<StateSpec> {
    let n = geometry.site_count();
    let alpha = amplitude(raw.alpha, raw.alpha_sq, "alpha")?;
    let beta = amplitude(raw.beta, raw.beta_sq, "beta")?;
    let gamma = amplitude(raw.gamma, raw.gamma_sq, "gamma")?;
    let require = |ok: bool, what: &str| if ok { Ok(()) } else { domain(format!("state.{label}: {what}")) };
    let used = |x: bool| x as u8;
    let extras = used(raw.pattern.is_some())
        + used(raw.occupations.is_some())
        + used(alpha.is_some())
        + used(beta.is_some() || gamma.is_some())
        + used(raw.particles.is_some());
    let mut supersolid = None;
    let state = match raw.kind {
        StateKind::Unit => {
            require(extras == 0, "unit filling takes no further keys")?;
            ManyBodyState::unit_filling(n)
        }
        StateKind::Pattern => {
            require(extras == 1 && (raw.pattern.is_some() || raw.occupations.is_some()), "pattern needs exactly one of `pattern`, `occupations`")?;
            match (raw.pattern, raw.occupations) {
                (Some(p), None) => make_pattern(p.parse::<PatternKind>()?, geometry)?,
                (None, Some(o)) => ManyBodyState::FockPattern { occupations: o },
                _ => unreachable!(),
            }
        }
        StateKind::Coherent => {
            require(extras == 1 && alpha.is_some(), "coherent needs exactly `alpha` or `alpha_sq`")?;
            ManyBodyState::homogeneous(n, alpha.unwrap())
        }
        StateKind::Supersolid => {
            require(extras == 1 && beta.is_some() && gamma.is_some(), "supersolid needs `beta` and `gamma` (or their _sq forms)")?;
            let (b, g) = (beta.unwrap(), gamma.unwrap());
            supersolid = Some((b, g));
            make_supersolid(geometry, b, g)
        }
        StateKind::Superposition => {
            require(extras == 1 && raw.particles.is_some(), "superposition needs `particles`")?;
            ManyBodyState::SymmetricSuperposition { particles: raw.particles.unwrap(), sites: n }
        }
    };
    state.validate_for(geometry)?;
    Ok(StateSpec { label, state, supersolid })
}

fn build_sweep(raw: RawSweep) -> Result<Sweep> {
    let values = match (raw.values_m, raw.start_m, raw.stop_m, raw.step_m) {
        (Some(v), None, None, None) => v,
        (None, Some(start), Some(stop), Some(step)) => {
            if !(step > 0.0) || !(stop >= start) {
                return domain("sweep needs step_m > 0 and stop_m >= start_m");
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            if n > 100_000 {
                return domain("sweep has more than 100000 points");
            }
            // integer multiples of the step keep every point reproducible
            (0..=n).map(|k| start + k as f64 * step).collect()
        }
        _ => return domain("sweep needs either values_m or all of start_m, stop_m, step_m"),
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return domain("sweep values must be finite and non-empty");
    }
    Ok(Sweep { axis: raw.axis, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "one"
lattice.dims = [1, 1, 1]
detector.center_m = [0.0, 0.0, 0.01]
detector.edges_m = [1.0, 1.0, 1.0]
detector.kappa = 1.0
state.mi.kind = "unit"
"#;

    #[test]
    fn minimal_scenario() {
        let s = Scenario::parse(MINIMAL).unwrap();
        assert_eq!(s.geometry.site_count(), 1);
        assert_eq!(s.states[0].label, "mi");
        assert_eq!(s.mode, PropagationMode::Exact);
        assert_eq!(s.points(), vec![None]);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let text = format!("{MINIMAL}detector.colour = \"red\"\n");
        assert!(matches!(Scenario::parse(&text), Err(Error::Domain(_))));
        let text = format!("{MINIMAL}lattice_dims = 3\n");
        assert!(Scenario::parse(&text).is_err());
        let text = format!("{MINIMAL}state.mi.alpha = 1.0\n");
        assert!(Scenario::parse(&text).is_err());
    }

    #[test]
    fn sweep_ranges() {
        let text = format!("{MINIMAL}sweep.axis = \"z0\"\nsweep.start_m = 0.01\nsweep.stop_m = 0.05\nsweep.step_m = 0.01\n");
        let s = Scenario::parse(&text).unwrap();
        assert_eq!(s.sweep.as_ref().unwrap().values.len(), 5);
        let (d, _) = s.detectors_at(Some(0.03)).unwrap();
        assert_eq!(d.z0(), 0.03);
        let text = format!("{MINIMAL}sweep.axis = \"xd\"\nsweep.values_m = [0.0]\n");
        assert!(Scenario::parse(&text).is_err());
    }

    #[test]
    fn amplitudes() {
        let text = MINIMAL.replace("state.mi.kind = \"unit\"", "state.ss.kind = \"supersolid\"\nstate.ss.beta_sq = 0.5\nstate.ss.gamma = [1.0, 0.5]");
        let s = Scenario::parse(&text).unwrap();
        let (b, g) = s.states[0].supersolid.unwrap();
        assert!((b.norm_sqr() - 0.5).abs() < 1e-15);
        assert_eq!(g, Complex64::new(1.0, 0.5));
    }

    #[test]
    fn invalid_physics_is_rejected() {
        assert!(Scenario::parse(&MINIMAL.replace("kappa = 1.0", "kappa = 1.5")).is_err());
        assert!(Scenario::parse(&MINIMAL.replace("[1.0, 1.0, 1.0]", "[1.0, 0.0, 1.0]")).is_err());
    }
}
