//! Pointwise expanded orbitals and a quadrature-only route to `A_ij`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::quadrature::{integrate_complex, panels_for};
use super::ExpansionContext;
use crate::error::Result;
use crate::lattice::{DetectorBox, LatticeGeometry, PhysicalParams};

/// One Cartesian factor of an expanded orbital centred at `xi` in the
/// co-falling frame:
/// `exp(-(x-xi)²/(2W²)) exp(-i ω_t (x-xi)² / (2ω W²)) / (π^{1/4} sqrt(iω_t + ω))`.
pub fn axis_mode(x: f64, xi: f64, ctx: &ExpansionContext) -> Complex64 {
    let (wt, w0) = (ctx.width, ctx.wannier_width);
    let w2 = wt * wt + w0 * w0;
    let dx2 = (x - xi) * (x - xi);
    let prefactor = 1.0 / (PI.powf(0.25) * Complex64::new(w0, wt).sqrt());
    prefactor * Complex64::from_polar((-dx2 / (2.0 * w2)).exp(), -dx2 * wt / (2.0 * w0 * w2))
}

/// Gravitational phase `exp(-i m g² t³ / (24 ħ))` shared by every orbital.
pub fn common_phase(t: f64, params: &PhysicalParams) -> Complex64 {
    let theta = params.mass * params.g * params.g * t.powi(3) / (24.0 * params.hbar);
    Complex64::from_polar(1.0, -theta.rem_euclid(2.0 * PI))
}

/// Full expanded orbital of site `site` at lab position `r` (z along gravity).
pub fn mode_value(r: [f64; 3], site: [f64; 3], ctx: &ExpansionContext, params: &PhysicalParams) -> Complex64 {
    let co_falling = [r[0], r[1], r[2] - ctx.fall];
    let mut value = common_phase(ctx.t_d, params);
    for k in 0..3 {
        value *= axis_mode(co_falling[k], site[k], ctx);
    }
    value
}

/// `A_ij` from adaptive quadrature of products of pointwise orbitals, one
/// axis at a time. Shares no closed-form code with
/// [`super::correlation_matrix`].
pub fn correlation_matrix_quadrature(
    geometry: &LatticeGeometry,
    detector: &DetectorBox,
    params: &PhysicalParams,
    tol: f64,
) -> Result<DMatrix<Complex64>> {
    let ctx = ExpansionContext::at_distance(detector.z0(), params)?;
    let mut tables = Vec::with_capacity(3);
    for axis in 0..3 {
        let n = geometry.dims[axis];
        let coord = |k: usize| (k as f64 - (n as f64 - 1.0) / 2.0) * geometry.spacing;
        let (lo, hi) = ctx.relative_bounds(detector, axis);
        let mut table = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for a in 0..n {
            for b in 0..n {
                let (xa, xb) = (coord(a), coord(b));
                let q = ctx.width * (xa - xb) / (ctx.wannier_width * ctx.full_width().powi(2));
                let panels = panels_for(lo, hi, q) + ((hi - lo) / ctx.full_width()).ceil() as usize;
                table[a][b] = integrate_complex(
                    |x| axis_mode(x, xa, &ctx).conj() * axis_mode(x, xb, &ctx),
                    lo,
                    hi,
                    tol,
                    panels,
                )?;
            }
        }
        tables.push(table);
    }
    let phase = common_phase(ctx.t_d, params);
    let weight = detector.kappa * (phase.conj() * phase);
    let n = geometry.site_count();
    let grid: Vec<[usize; 3]> = (0..n).map(|s| geometry.grid_index(s)).collect();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let (gi, gj) = (grid[i], grid[j]);
        weight * tables[0][gi[0]][gj[0]] * tables[1][gi[1]][gj[1]] * tables[2][gi[2]][gj[2]]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::{axis_norm, correlation_matrix, PropagationMode};

    #[test]
    fn axis_mode_is_normalised() {
        let p = PhysicalParams::default();
        let ctx = ExpansionContext::at_distance(0.01, &p).unwrap();
        let w = ctx.full_width();
        let norm = crate::propagation::integrate(|x| axis_mode(x, 0.0, &ctx).norm_sqr(), -20.0 * w, 20.0 * w, 1e-13, 8)
            .unwrap();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!((axis_mode(0.0, 0.0, &ctx).norm_sqr() - axis_norm(w)).abs() < 1e-9 * axis_norm(w));
    }

    #[test]
    fn common_phase_cancels() {
        let p = PhysicalParams::default();
        let ctx = ExpansionContext::at_distance(0.01, &p).unwrap();
        let r = [1e-4, -2e-4, 0.01 + 3e-5];
        let (si, sj) = ([0.0, 0.0, 0.5e-6], [0.0, 0.5e-6, 0.0]);
        let with = mode_value(r, si, &ctx, &p).conj() * mode_value(r, sj, &ctx, &p);
        let mut without = Complex64::new(1.0, 0.0);
        for k in 0..3 {
            let x = if k == 2 { r[2] - ctx.fall } else { r[k] };
            without *= axis_mode(x, si[k], &ctx).conj() * axis_mode(x, sj[k], &ctx);
        }
        assert!((with - without).norm() < 1e-12 * without.norm());
    }

    #[test]
    fn quadrature_reproduces_closed_form() {
        let p = PhysicalParams::default();
        let geo = LatticeGeometry::new([2, 1, 3], LatticeGeometry::DEFAULT_SPACING).unwrap();
        let det = DetectorBox::new([1e-4, 0.0, 0.01], [1e-3, 2e-3, 1e-4], 0.8).unwrap();
        let closed = correlation_matrix(&geo, &det, &p, PropagationMode::Exact).unwrap();
        let quad = correlation_matrix_quadrature(&geo, &det, &p, 1e-12).unwrap();
        let diff = (&closed.entries - &quad).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-9, "{diff}");
    }
}
