//! Free fall of the released orbitals and the detector correlation matrix
//! `A_ij = κ ∫_Ω φ_i^*(r, t_d) φ_j(r, t_d) dr`.
//!
//! All integrals are evaluated in the co-falling frame: the cloud centre sits
//! at `z_t = g t²/2` below the lattice, and a detector centred at
//! `(0, 0, z0)` is centred on the cloud at `t_d = sqrt(2 z0 / g)`.
//!
//! Both the mode functions and the box factorise over Cartesian axes, so each
//! matrix element is a product of three one-dimensional segment integrals and
//! the whole matrix is a Kronecker product of per-axis tables.

mod modes;
mod quadrature;
mod segment;


use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::lattice::{DetectorBox, LatticeGeometry, PhysicalParams};

pub use modes::{axis_mode, correlation_matrix_quadrature, mode_value};
pub use quadrature::{integrate, integrate_complex, quadrature_segment_oracle, SUBDIVISION_BUDGET};
pub use segment::gaussian_phase_segment;

pub(crate) use segment::damped_erf_difference;

/// Fall time until the cloud centre reaches a detector `z0` below the lattice.
pub fn time_of_flight(z0: f64, params: &PhysicalParams) -> Result<f64> {
    if !(z0.is_finite() && z0 > 0.0) {
        return domain(format!("fall distance must be positive, got {z0}"));
    }
    Ok((2.0 * z0 / params.g).sqrt())
}

/// Width `ħ t / (m ω)` of an expanded orbital after time `t`.
pub fn expanded_width(t: f64, params: &PhysicalParams) -> f64 {
    params.hbar * t / (params.mass * params.wannier_width)
}

/// Time, width and fall displacement at the moment of detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionContext {
    /// s
    pub t_d: f64,
    /// Expanded width `ω_t`, m.
    pub width: f64,
    /// `g t_d² / 2`, m.
    pub fall: f64,
    /// Initial Wannier width `ω`, m.
    pub wannier_width: f64,
}

impl ExpansionContext {
    pub fn at_distance(z0: f64, params: &PhysicalParams) -> Result<Self> {
        params.validate()?;
        let t_d = time_of_flight(z0, params)?;
        Ok(Self {
            t_d,
            width: expanded_width(t_d, params),
            fall: 0.5 * params.g * t_d * t_d,
            wannier_width: params.wannier_width,
        })
    }

    /// `sqrt(ω_t² + ω²)`, the envelope width kept by the exact mode.
    pub fn full_width(&self) -> f64 {
        self.width.hypot(self.wannier_width)
    }

    /// Detector bounds along `axis` in the co-falling frame.
    pub fn relative_bounds(&self, detector: &DetectorBox, axis: usize) -> (f64, f64) {
        let (lo, hi) = detector.bounds(axis);
        if axis == 2 {
            (lo - self.fall, hi - self.fall)
        } else {
            (lo, hi)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagationMode {
    /// Full propagated Gaussians, no far-field truncation.
    #[default]
    Exact,
    /// Leading order in `ω / ω_t`; off-diagonal entries are Hermitised.
    FarField,
}

impl std::str::FromStr for PropagationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "far_field" => Ok(Self::FarField),
            other => domain(format!("unknown mode '{other}', expected exact or far_field")),
        }
    }
}

/// Hermitian correlation matrix together with the geometry it was built for.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub entries: DMatrix<Complex64>,
    pub mode: PropagationMode,
    pub context: ExpansionContext,
    pub detector: DetectorBox,
}

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

impl CorrelationMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn kappa(&self) -> f64 {
        self.detector.kappa
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).collect()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigenvalues(&self.entries).into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        eigenvalues(&self.entries).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest `|A_ij| / sqrt(A_ii A_jj)` over `i != j`.
    pub fn max_offdiagonal_ratio(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let scale = (self.entries[(i, i)].re * self.entries[(j, j)].re).sqrt();
                    if scale > 0.0 {
                        worst = worst.max(self.entries[(i, j)].norm() / scale);
                    }
                }
            }
        }
        worst
    }

    /// Hermitian, real non-negative diagonal bounded by κ, and positive
    /// semidefinite.
    pub fn check_invariants(&self) -> Result<()> {
        check_matrix(&self.entries, self.kappa())
    }
}

pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

pub(crate) fn check_matrix(m: &DMatrix<Complex64>, kappa: f64) -> Result<()> {
    let defect = hermiticity_defect(m);
    if defect > HERMITIAN_TOL {
        return Err(Error::Invariant(format!("correlation matrix not Hermitian (defect {defect:e})")));
    }
    for i in 0..m.nrows() {
        let d = m[(i, i)];
        if d.im.abs() > HERMITIAN_TOL || d.re < -PSD_TOL || d.re > kappa + PSD_TOL {
            return Err(Error::Invariant(format!("diagonal entry {i} = {d} outside [0, κ = {kappa}]")));
        }
    }
    let lowest = eigenvalues(m).into_iter().fold(f64::INFINITY, f64::min);
    if lowest < -PSD_TOL {
        return Err(Error::Invariant(format!("correlation matrix not PSD (eigenvalue {lowest:e})")));
    }
    Ok(())
}

/// Assembles `A_ij` for one detector.
pub fn correlation_matrix(
    geometry: &LatticeGeometry,
    detector: &DetectorBox,
    params: &PhysicalParams,
    mode: PropagationMode,
) -> Result<CorrelationMatrix> {
    params.validate()?;
    detector.validate()?;
    let context = ExpansionContext::at_distance(detector.z0(), params)?;
    if !(context.width > 0.0) {
        return domain("expanded width must be positive");
    }
    let entries = assemble(geometry, [0.0; 3], detector, &context, mode);
    Ok(CorrelationMatrix { entries, mode, context, detector: *detector })
}

/// Matrix for a lattice whose centre is displaced by `offset`.
pub(crate) fn assemble(
    geometry: &LatticeGeometry,
    offset: [f64; 3],
    detector: &DetectorBox,
    context: &ExpansionContext,
    mode: PropagationMode,
) -> DMatrix<Complex64> {
    let tables: Vec<_> = (0..3)
        .map(|axis| axis_table(geometry, offset[axis], detector, context, axis, mode))
        .collect();
    let mut entries = kronecker(geometry, &tables, detector.kappa);
    if mode == PropagationMode::FarField {
        let adjoint = entries.adjoint();
        entries = (&entries + adjoint).map(|z| 0.5 * z);
    }
    entries
}

/// Per-axis factor table `T[a][b]` for grid coordinates `a`, `b` along `axis`.
fn axis_table(
    geometry: &LatticeGeometry,
    offset: f64,
    detector: &DetectorBox,
    context: &ExpansionContext,
    axis: usize,
    mode: PropagationMode,
) -> Vec<Vec<Complex64>> {
    let n = geometry.dims[axis];
    let coord = |k: usize| offset + (k as f64 - (n as f64 - 1.0) / 2.0) * geometry.spacing;
    let (lo, hi) = context.relative_bounds(detector, axis);
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            (0..n)
                .map(|b| match mode {
                    PropagationMode::Exact => exact_axis_factor(lo, hi, coord(a), coord(b), context),
                    PropagationMode::FarField => far_field_axis_factor(lo, hi, coord(a), coord(b), context),
                })
                .collect()
        })
        .collect();
    // Exact mode is Hermitian analytically; mirror the upper triangle so the
    // identity also holds bit for bit.
    let mut rows = rows;
    if mode == PropagationMode::Exact {
        for a in 0..n {
            for b in 0..a {
                rows[a][b] = rows[b][a].conj();
            }
        }
    }
    rows
}

/// `(1/(√π W)) ∫_lo^hi exp(-[(x-x_a)² + (x-x_b)²]/(2W²)) exp(iκ[(x-x_a)² - (x-x_b)²]) dx`
/// with `W² = ω_t² + ω²` and `κ = ω_t / (2ω W²)`.
///
/// The phase difference is linear, `-q (x - c)` about the midpoint `c`, so the
/// integrand is a shifted Gaussian times a plane wave.
fn exact_axis_factor(lo: f64, hi: f64, xa: f64, xb: f64, ctx: &ExpansionContext) -> Complex64 {
    let w = ctx.full_width();
    let sep = xa - xb;
    let mid = 0.5 * (xa + xb);
    let q = ctx.width * sep / (ctx.wannier_width * w * w);
    let overlap = (-(sep * sep) / (4.0 * w * w)).exp();
    let d = damped_erf_difference((lo - mid) / w, (hi - mid) / w, 0.5 * q * w);
    0.5 * overlap * d
}

/// Far-field factor with the envelope centred on site `a` and the plane wave
/// `exp(-i x (x_a - x_b) / (ω ω_t))`.
fn far_field_axis_factor(lo: f64, hi: f64, xa: f64, xb: f64, ctx: &ExpansionContext) -> Complex64 {
    let w = ctx.width;
    let q = (xa - xb) / (ctx.wannier_width * w);
    let d = damped_erf_difference((lo - xa) / w, (hi - xa) / w, 0.5 * q * w);
    0.5 * Complex64::from_polar(1.0, -q * xa) * d
}

fn kronecker(geometry: &LatticeGeometry, tables: &[Vec<Vec<Complex64>>], kappa: f64) -> DMatrix<Complex64> {
    let n = geometry.site_count();
    let grid: Vec<[usize; 3]> = (0..n).map(|s| geometry.grid_index(s)).collect();
    let columns: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (0..n)
                .map(|i| {
                    let (gi, gj) = (grid[i], grid[j]);
                    kappa * tables[0][gi[0]][gj[0]] * tables[1][gi[1]][gj[1]] * tables[2][gi[2]][gj[2]]
                })
                .collect()
        })
        .collect();
    DMatrix::from_iterator(n, n, columns.into_iter().flatten())
}

/// Normalisation of an axis factor, `1 / (√π W)`.
#[cfg(test)]
pub(crate) fn axis_norm(width: f64) -> f64 {
    1.0 / (std::f64::consts::PI.sqrt() * width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> PhysicalParams {
        PhysicalParams::default()
    }

    #[test]
    fn fall_time_one_centimetre() {
        let t = time_of_flight(0.01, &params()).unwrap();
        assert!((t - (0.02f64 / 9.81).sqrt()).abs() < 1e-15);
        assert!((t - 0.04515).abs() < 5e-6);
        let t4 = time_of_flight(0.04, &params()).unwrap();
        assert!((t4 - 2.0 * t).abs() < 1e-15);
        assert!(time_of_flight(0.0, &params()).is_err());
        assert!(time_of_flight(-1.0, &params()).is_err());
    }

    #[test]
    fn expanded_width_is_linear() {
        let p = params();
        assert_eq!(expanded_width(0.0, &p), 0.0);
        let w1 = expanded_width(0.02, &p);
        assert!((expanded_width(0.04, &p) - 2.0 * w1).abs() < 1e-18);
        let w = expanded_width(0.04515, &p);
        assert!((w - 0.8e-3).abs() < 0.05 * 0.8e-3, "{w}");
    }

    #[test]
    fn width_at_detector_one_centimetre() {
        let ctx = ExpansionContext::at_distance(0.01, &params()).unwrap();
        assert!((ctx.width - 0.8e-3).abs() < 0.04e-3);
        assert!((ctx.fall - 0.01).abs() < 1e-15);
    }

    #[test]
    fn whole_space_detector_is_identity() {
        let p = params();
        let geo = LatticeGeometry::new([3, 2, 2], LatticeGeometry::DEFAULT_SPACING).unwrap();
        let ctx = ExpansionContext::at_distance(0.01, &p).unwrap();
        let edge = 40.0 * ctx.width;
        let det = DetectorBox::below(0.01, [edge; 3], 1.0).unwrap();
        let a = correlation_matrix(&geo, &det, &p, PropagationMode::Exact).unwrap();
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                let v = a.entries[(i, j)];
                if i == j {
                    assert!((v.re - 1.0).abs() < 1e-8 && v.im.abs() < 1e-12);
                } else {
                    assert!(v.norm() < 1e-6);
                }
            }
        }
        a.check_invariants().unwrap();
    }

    #[test]
    fn exact_mode_is_hermitian_without_symmetrisation() {
        let p = params();
        let geo = LatticeGeometry::vertical_chain(6, LatticeGeometry::DEFAULT_SPACING).unwrap();
        let det = DetectorBox::below(0.01, [1e-2, 1e-2, 2e-5], 1.0).unwrap();
        let a = correlation_matrix(&geo, &det, &p, PropagationMode::Exact).unwrap();
        assert_eq!(a.hermiticity_defect(), 0.0);
        a.check_invariants().unwrap();
    }

    #[test]
    fn narrow_detector_has_strong_interference() {
        let p = params();
        let geo = LatticeGeometry::vertical_chain(12, LatticeGeometry::DEFAULT_SPACING).unwrap();
        let det = DetectorBox::below(0.01, [1e-3, 1e-3, 2e-5], 1.0).unwrap();
        let a = correlation_matrix(&geo, &det, &p, PropagationMode::Exact).unwrap();
        let ratio = a.entries[(5, 6)].norm() / a.entries[(5, 5)].re;
        assert!(ratio > 0.3, "{ratio}");
    }

    #[test]
    fn two_disjoint_detectors_bounded_by_kappa() {
        let p = params();
        let geo = LatticeGeometry::new([3, 1, 3], LatticeGeometry::DEFAULT_SPACING).unwrap();
        let kappa = 0.7;
        let d1 = DetectorBox::new([1e-3, 0.0, 0.01], [2e-3, 2e-3, 2e-4], kappa).unwrap();
        let d2 = DetectorBox::new([-1e-3, 0.0, 0.01], [2e-3, 2e-3, 2e-4], kappa).unwrap();
        let a1 = correlation_matrix(&geo, &d1, &p, PropagationMode::Exact).unwrap();
        let a2 = correlation_matrix(&geo, &d2, &p, PropagationMode::Exact).unwrap();
        let sum = &a1.entries + &a2.entries;
        let top = eigenvalues(&sum).into_iter().fold(f64::NEG_INFINITY, f64::max);
        assert!(top <= kappa + 1e-8);
    }

    #[test]
    fn far_field_matches_exact_for_broad_modes() {
        // ω_t / ω ≈ 8.7e4 at z0 = 0.5 m; sites close to the origin
        let p = params();
        let geo = LatticeGeometry::vertical_chain(3, LatticeGeometry::DEFAULT_SPACING).unwrap();
        let ctx = ExpansionContext::at_distance(0.5, &p).unwrap();
        assert!(ctx.width / p.wannier_width > 1e4);
        let det = DetectorBox::below(0.5, [0.01, 0.01, 0.2 * ctx.width], 1.0).unwrap();
        let exact = correlation_matrix(&geo, &det, &p, PropagationMode::Exact).unwrap();
        let far = correlation_matrix(&geo, &det, &p, PropagationMode::FarField).unwrap();
        let scale = exact.entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let diff = (&exact.entries - &far.entries).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-3 * scale, "{diff} vs {scale}");
        far.check_invariants().unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn random_boxes_give_valid_matrices(
            nx in 1usize..4, nz in 1usize..4,
            z0 in 0.003f64..0.05,
            dx in 1e-4f64..1e-2, dz in 1e-6f64..3e-3,
            cx in -2e-3f64..2e-3,
            kappa in 0.05f64..1.0,
        ) {
            let p = params();
            let geo = LatticeGeometry::new([nx, 1, nz], LatticeGeometry::DEFAULT_SPACING).unwrap();
            let det = DetectorBox::new([cx, 0.0, z0], [dx, dx, dz], kappa).unwrap();
            let a = correlation_matrix(&geo, &det, &p, PropagationMode::Exact).unwrap();
            prop_assert!(a.check_invariants().is_ok());
        }

        #[test]
        fn diagonal_grows_with_nested_boxes(
            dz in 1e-6f64..2e-3, grow in 1.0f64..3.0, dx in 1e-4f64..5e-3,
        ) {
            let p = params();
            let geo = LatticeGeometry::new([2, 1, 3], LatticeGeometry::DEFAULT_SPACING).unwrap();
            let small = DetectorBox::below(0.01, [dx, dx, dz], 1.0).unwrap();
            let big = DetectorBox::below(0.01, [dx * grow, dx, dz * grow], 1.0).unwrap();
            let a = correlation_matrix(&geo, &small, &p, PropagationMode::Exact).unwrap();
            let b = correlation_matrix(&geo, &big, &p, PropagationMode::Exact).unwrap();
            for (x, y) in a.diagonal().iter().zip(b.diagonal()) {
                prop_assert!(y >= x - 1e-15);
            }
        }

        #[test]
        fn lateral_translation_leaves_matrix_unchanged(sx in -5e-3f64..5e-3, sy in -5e-3f64..5e-3) {
            let p = params();
            let geo = LatticeGeometry::new([3, 2, 1], LatticeGeometry::DEFAULT_SPACING).unwrap();
            let det = DetectorBox::below(0.01, [1e-3, 2e-3, 5e-5], 1.0).unwrap();
            let a = correlation_matrix(&geo, &det, &p, PropagationMode::Exact).unwrap();
            let moved = DetectorBox::new([sx, sy, 0.01], det.edges, 1.0).unwrap();
            let shifted = assemble(&geo, [sx, sy, 0.0], &moved, &a.context, PropagationMode::Exact);
            let diff = (&a.entries - &shifted).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(diff < 1e-12, "{}", diff);
        }
    }
}
