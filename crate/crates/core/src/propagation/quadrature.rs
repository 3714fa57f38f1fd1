//! Adaptive Gauss–Kronrod (21 point) quadrature, used as an independent
//! reference for the closed-form segment integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Maximum number of subintervals before giving up.
pub const SUBDIVISION_BUDGET: usize = 20_000;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Error estimate already sits at the rounding floor.
    settled: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // settled panels sink to the bottom of the heap
        (!self.settled, self.error)
            .partial_cmp(&(!other.settled, other.error))
            .unwrap_or(Ordering::Equal)
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    let settled = error <= floor;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(floor);
    }
    Panel { a, b, value: resk * half, error, settled }
}

/// Adaptive integration of a real function on `[a, b]` to relative tolerance
/// `tol`. The interval is pre-split into `initial` equal panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, initial: usize) -> Result<f64> {
    if !(a < b) || !(tol > 0.0) {
        return domain(format!("quadrature needs a < b and tol > 0, got [{a}, {b}], tol {tol}"));
    }
    let initial = initial.clamp(1, SUBDIVISION_BUDGET / 2);
    let h = (b - a) / initial as f64;
    let mut heap: BinaryHeap<Panel> = (0..initial)
        .map(|k| {
            let lo = a + h * k as f64;
            let hi = if k + 1 == initial { b } else { a + h * (k + 1) as f64 };
            kronrod21(&f, lo, hi)
        })
        .collect();
    let (mut total, mut err) = summarize(&heap);
    loop {
        let worst = *heap.peek().expect("heap never empty");
        if err <= tol * total.abs() || worst.settled {
            return Ok(summarize(&heap).0);
        }
        if heap.len() >= SUBDIVISION_BUDGET {
            let (estimate, error_estimate) = summarize(&heap);
            return Err(Error::NoConvergence { intervals: heap.len(), estimate, error_estimate });
        }
        heap.pop();
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod21(&f, worst.a, mid);
        let right = kronrod21(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if heap.len() % 512 == 0 {
            (total, err) = summarize(&heap);
        }
    }
}

// Neumaier-compensated totals in a fixed (interval) order.
fn summarize(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut err = 0.0;
    for p in panels {
        let t = sum + p.value;
        comp += if sum.abs() >= p.value.abs() { (sum - t) + p.value } else { (p.value - t) + sum };
        sum = t;
        err += p.error;
    }
    (sum + comp, err)
}

/// Numerical reference for [`super::gaussian_phase_segment`]: real and
/// imaginary parts of `∫_a^b exp(-(x-c)^2/w^2) exp(-iqx) dx` integrated
/// separately.
pub fn quadrature_segment_oracle(a: f64, b: f64, c: f64, w: f64, q: f64, tol: f64) -> Result<Complex64> {
    if ![a, b, c, w, q, tol].iter().all(|v| v.is_finite()) || !(w > 0.0) {
        return domain("quadrature oracle needs finite inputs and w > 0");
    }
    let panels = panels_for(a, b, q);
    let envelope = move |x: f64| (-((x - c) / w).powi(2)).exp();
    let re = integrate(|x| envelope(x) * (q * x).cos(), a, b, tol, panels)?;
    let im = if q == 0.0 {
        0.0
    } else {
        integrate(|x| -envelope(x) * (q * x).sin(), a, b, tol, panels)?
    };
    Ok(Complex64::new(re, im))
}

/// One panel per oscillation period keeps every Kronrod panel smooth.
pub(crate) fn panels_for(a: f64, b: f64, q: f64) -> usize {
    let periods = (q.abs() * (b - a) / (2.0 * std::f64::consts::PI)).ceil();
    (periods as usize).clamp(1, 4096)
}

/// Adaptive integration of a complex integrand, real and imaginary parts
/// separately.
pub fn integrate_complex<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    initial: usize,
) -> Result<Complex64> {
    let re = integrate(|x| f(x).re, a, b, tol, initial)?;
    let im = integrate(|x| f(x).im, a, b, tol, initial)?;
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1e-14, 1).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn real_erf_difference() {
        // erf(1.5) - erf(-0.5), 30-digit reference
        let reference = 0.966105146475310713936933729949 + 0.520499877813046537682746653892;
        let v = quadrature_segment_oracle(-0.5, 1.5, 0.0, 1.0, 0.0, 1e-13).unwrap();
        assert!(v.im == 0.0);
        assert!((v.re - 0.5 * PI.sqrt() * reference).abs() < 1e-13);
    }

    #[test]
    fn highly_oscillatory_converges() {
        let w = 1.0;
        let q = 50.0;
        let v = quadrature_segment_oracle(-3.0, 2.0, 0.1, w, q, 1e-8).unwrap();
        let closed = crate::propagation::gaussian_phase_segment(-3.0, 2.0, 0.1, w, q).unwrap();
        assert!((v - closed).norm() < 1e-8 * closed.norm());
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        // ~160k oscillations cannot be resolved within the budget
        let err = integrate(|x| (1e6 * x).sin(), 0.0, 1.0, 1e-12, 1).unwrap_err();
        match err {
            Error::NoConvergence { estimate, .. } => assert!(estimate.is_finite()),
            other => panic!("unexpected {other:?}"),
        }
    }
}
