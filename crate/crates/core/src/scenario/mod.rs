//! Complete runs: scenario files in, plot data out.
//!
//! [`compute`] is pure; [`run`] adds the output files and [`verify`] repeats
//! the scenario through the brute-force oracle. Failures map onto process
//! exit codes through [`RunError::exit_code`].

mod config;
mod output;
mod presets;

pub use config::{CountingSettings, OutputSettings, Scenario, StateSpec, Sweep, SweepAxis};
pub use output::{write_outputs, OutputFiles};
pub use presets::{figure, figure_text, verify_preset, VERIFY_PRESETS};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::counting::{
    homogeneous_mean_nn, state_joint_probabilities, state_probabilities, supersolid_mean_nn, CountingDistribution,
    JointDistribution,
};
use crate::error::Error;
use crate::lattice::{DetectorBox, ManyBodyState};
use crate::oracle::{oracle_distribution, oracle_joint_distribution, FockOracle};
use crate::propagation::{correlation_matrix, CorrelationMatrix, PropagationMode};

/// Largest lattice accepted by [`verify`].
pub const VERIFY_MAX_SITES: usize = 8;
/// Largest oracle deviation accepted by [`verify`].
pub const VERIFY_TOL: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(Error),
    #[error("{0}")]
    Capacity(Error),
    /// Carries the matrices in use when the check failed.
    #[error("{error}")]
    Invariant { error: Error, matrices: Vec<DMatrix<Complex64>> },
    #[error("oracle disagrees: {0}")]
    Mismatch(String),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Capacity(_) => 3,
            Self::Invariant { .. } | Self::Mismatch(_) => 4,
            Self::Io(_) => 1,
        }
    }

    fn at(error: Error, matrices: &[&DMatrix<Complex64>]) -> Self {
        match error {
            Error::Domain(_) => Self::Config(error),
            Error::Capacity { .. } => Self::Capacity(error),
            // a non-convergent integral is a broken numerical guarantee
            Error::Invariant(_) | Error::NoConvergence { .. } | Error::UndefinedCorrelation(_) => {
                Self::Invariant { error, matrices: matrices.iter().map(|m| (*m).clone()).collect() }
            }
        }
    }
}

impl From<Error> for RunError {
    fn from(error: Error) -> Self {
        Self::at(error, &[])
    }
}

/// Summary of one correlation matrix.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixDiagnostics {
    pub trace: f64,
    pub max_offdiagonal_ratio: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub hermiticity_defect: f64,
    /// Expanded orbital width `ω_t` at the detector, m.
    pub expanded_width: f64,
    pub fall_time: f64,
}

impl MatrixDiagnostics {
    fn of(a: &CorrelationMatrix) -> Self {
        Self {
            trace: a.diagonal().iter().sum(),
            max_offdiagonal_ratio: a.max_offdiagonal_ratio(),
            min_eigenvalue: a.min_eigenvalue(),
            max_eigenvalue: a.max_eigenvalue(),
            hermiticity_defect: a.hermiticity_defect(),
            expanded_width: a.context.width,
            fall_time: a.context.t_d,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StateResult {
    pub label: String,
    /// Counts at the first detector.
    pub distribution: CountingDistribution,
    pub joint: Option<JointDistribution>,
    /// Nearest-neighbour approximation of the mean for coherent chains.
    pub nn_mean: Option<f64>,
}

impl StateResult {
    /// `cov / (σ₁² σ₂²)`; NaN without a second detector or with a zero variance.
    pub fn corr(&self) -> f64 {
        self.joint.as_ref().and_then(|j| j.moments().corr().ok()).unwrap_or(f64::NAN)
    }

    pub fn pearson(&self) -> f64 {
        self.joint.as_ref().and_then(|j| j.moments().pearson().ok()).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone)]
pub struct PointResult {
    pub axis_value: Option<f64>,
    pub detectors: Vec<DetectorBox>,
    pub matrices: Vec<MatrixDiagnostics>,
    /// `A_ii, |A_i,i+1|, |A_i,i+2|, |A_i,i+3|` around the chain centre.
    pub a_elements: Option<[f64; 4]>,
    pub states: Vec<StateResult>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub name: String,
    pub mode: PropagationMode,
    pub sites: usize,
    pub axis: Option<SweepAxis>,
    pub points: Vec<PointResult>,
}

impl RunReport {
    pub fn state(&self, point: usize, label: &str) -> Option<&StateResult> {
        self.points.get(point)?.states.iter().find(|s| s.label == label)
    }
}

/// Matrices of one sweep point, after the on-site reduction if requested.
fn point_matrices(scenario: &Scenario, value: Option<f64>) -> Result<(Vec<DetectorBox>, Vec<CorrelationMatrix>), RunError> {
    let (d1, d2) = scenario.detectors_at(value).map_err(RunError::Config)?;
    let detectors: Vec<DetectorBox> = std::iter::once(d1).chain(d2).collect();
    let mut matrices = Vec::with_capacity(detectors.len());
    for det in &detectors {
        let mut a = correlation_matrix(&scenario.geometry, det, &scenario.params, scenario.mode)?;
        a.check_invariants().map_err(|e| RunError::at(e, &[&a.entries]))?;
        if scenario.counting.onsite_only {
            let diag = a.entries.diagonal();
            a.entries = DMatrix::from_diagonal(&diag);
        }
        matrices.push(a);
    }
    Ok((detectors, matrices))
}

fn a_elements(a: &DMatrix<Complex64>) -> [f64; 4] {
    let n = a.nrows();
    let i = (n.max(1) - 1) / 2;
    let at = |k: usize| if i + k < n { a[(i, i + k)].norm() } else { f64::NAN };
    [a[(i, i)].re, at(1), at(2), at(3)]
}

fn nn_mean(scenario: &Scenario, spec: &StateSpec, a: &DMatrix<Complex64>) -> Option<f64> {
    let n = scenario.geometry.site_count();
    if scenario.geometry.chain_axis().is_none() || n < 2 {
        return None;
    }
    if let Some((beta, gamma)) = spec.supersolid {
        return Some(supersolid_mean_nn(a, beta, gamma, n));
    }
    match &spec.state {
        ManyBodyState::CoherentProduct { amplitudes } if amplitudes.iter().all(|z| *z == amplitudes[0]) => {
            Some(homogeneous_mean_nn(a, amplitudes[0], n))
        }
        _ => None,
    }
}

/// Runs every sweep point and state without touching the file system.
pub fn compute(scenario: &Scenario) -> Result<RunReport, RunError> {
    let options = scenario.counting.options;
    let mut points = Vec::new();
    for value in scenario.points() {
        let (detectors, matrices) = point_matrices(scenario, value)?;
        let entries: Vec<&DMatrix<Complex64>> = matrices.iter().map(|m| &m.entries).collect();
        let fail = |e: Error| RunError::at(e, &entries);
        let a1 = entries[0];
        let mut states = Vec::with_capacity(scenario.states.len());
        for spec in &scenario.states {
            let (distribution, joint) = match entries.get(1) {
                Some(a2) => {
                    let joint = state_joint_probabilities(a1, a2, &spec.state, &options).map_err(fail)?;
                    (joint.first.clone(), Some(joint))
                }
                None => {
                    let dist = state_probabilities(a1, &spec.state, &options, scenario.counting.interpretation)
                        .map_err(fail)?;
                    (dist, None)
                }
            };
            states.push(StateResult {
                label: spec.label.clone(),
                distribution,
                joint,
                nn_mean: nn_mean(scenario, spec, a1),
            });
        }
        points.push(PointResult {
            axis_value: value,
            detectors,
            matrices: matrices.iter().map(MatrixDiagnostics::of).collect(),
            a_elements: scenario.output.a_elements.then(|| a_elements(a1)),
            states,
        });
    }
    Ok(RunReport {
        name: scenario.name.clone(),
        mode: scenario.mode,
        sites: scenario.geometry.site_count(),
        axis: scenario.sweep.as_ref().map(|s| s.axis),
        points,
    })
}

/// [`compute`] followed by [`write_outputs`]. On an invariant violation the
/// offending matrices are written to `A_dump.csv` (and `A2_dump.csv`).
pub fn run(scenario: &Scenario, out_dir: &std::path::Path) -> Result<(RunReport, OutputFiles), RunError> {
    std::fs::create_dir_all(out_dir)?;
    match compute(scenario) {
        Ok(report) => {
            let files = write_outputs(scenario, &report, out_dir)?;
            Ok((report, files))
        }
        Err(RunError::Invariant { error, matrices }) => {
            for (k, m) in matrices.iter().enumerate() {
                let name = if k == 0 { "A_dump.csv".to_string() } else { format!("A{}_dump.csv", k + 1) };
                output::write_matrix(&out_dir.join(name), m)?;
            }
            Err(RunError::Invariant { error, matrices })
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyCheck {
    pub axis_value: Option<f64>,
    pub label: String,
    /// `distribution`, `joint`, `generating` or `joint_generating`.
    pub quantity: &'static str,
    pub max_abs_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub name: String,
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    pub fn max_abs_error(&self) -> f64 {
        self.checks.iter().map(|c| c.max_abs_error).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_abs_error() <= VERIFY_TOL
    }
}

const VERIFY_LAMBDAS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

fn max_diff(a: impl Iterator<Item = (f64, f64)>) -> f64 {
    a.map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Re-derives every distribution of the scenario with the oracle: full
/// tables for number states, `Q(λ)` at four points for coherent states.
/// A report whose error exceeds [`VERIFY_TOL`] is returned as
/// [`RunError::Mismatch`].
pub fn verify(scenario: &Scenario) -> Result<VerifyReport, RunError> {
    let n = scenario.geometry.site_count();
    if n > VERIFY_MAX_SITES {
        return Err(RunError::Capacity(Error::Capacity { what: "sites for verification", got: n, limit: VERIFY_MAX_SITES }));
    }
    let report = compute(scenario)?;
    let mut checks = Vec::new();
    for (value, point) in scenario.points().into_iter().zip(&report.points) {
        let (_, matrices) = point_matrices(scenario, value)?;
        let a1 = &matrices[0].entries;
        for (spec, result) in scenario.states.iter().zip(&point.states) {
            let mut check = |quantity, max_abs_error| {
                checks.push(VerifyCheck { axis_value: value, label: spec.label.clone(), quantity, max_abs_error })
            };
            let coherent = matches!(spec.state, ManyBodyState::CoherentProduct { .. });
            match (matrices.get(1), &result.joint) {
                (None, _) if coherent => {
                    let mut oracle = FockOracle::for_state(&spec.state)?;
                    let mut worst = 0.0f64;
                    for l in VERIFY_LAMBDAS {
                        let q = oracle.generating(&[(l, a1)], &spec.state)?;
                        worst = worst.max((q - result.distribution.generating(l)).abs());
                    }
                    check("generating", worst);
                }
                (None, _) => {
                    let oracle = oracle_distribution(a1, &spec.state)?;
                    let n = oracle.probabilities.len().max(result.distribution.probabilities.len());
                    check("distribution", max_diff((0..n).map(|m| (oracle.get(m), result.distribution.get(m)))));
                }
                (Some(a2), Some(joint)) if coherent => {
                    let a2 = &a2.entries;
                    let mut oracle = FockOracle::for_state(&spec.state)?;
                    let mut worst = 0.0f64;
                    for l1 in VERIFY_LAMBDAS {
                        for l2 in VERIFY_LAMBDAS {
                            let q = oracle.generating(&[(l1, a1), (l2, a2)], &spec.state)?;
                            let ours: f64 = joint
                                .entries()
                                .map(|(m, k, p)| p * (1.0 - l1).powi(m as i32) * (1.0 - l2).powi(k as i32))
                                .sum();
                            worst = worst.max((q - ours).abs());
                        }
                    }
                    check("joint_generating", worst);
                }
                (Some(a2), Some(joint)) => {
                    let oracle = oracle_joint_distribution(a1, &a2.entries, &spec.state)?;
                    let rows = oracle.probabilities.nrows().max(joint.probabilities.nrows());
                    let cols = oracle.probabilities.ncols().max(joint.probabilities.ncols());
                    let pairs = (0..rows).flat_map(|m| (0..cols).map(move |k| (m, k)));
                    check("joint", max_diff(pairs.map(|(m, k)| (oracle.get(m, k), joint.get(m, k)))));
                }
                (Some(_), None) => unreachable!("two detectors always produce a joint table"),
            }
        }
    }
    let report = VerifyReport { name: scenario.name.clone(), checks };
    if !report.passed() {
        let worst = report.checks.iter().max_by(|a, b| a.max_abs_error.total_cmp(&b.max_abs_error)).unwrap();
        return Err(RunError::Mismatch(format!(
            "{} of state `{}` differs by {:e} (tolerance {VERIFY_TOL:e})",
            worst.quantity, worst.label, worst.max_abs_error
        )));
    }
    Ok(report)
}
