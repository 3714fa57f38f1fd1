//! Acceptance criteria 1–10, one PASS/FAIL line each. Criteria that the
//! physics does not support at the stated thresholds stay red; the numbers
//! on the line say by how much.

mod common;

use std::time::{Duration, Instant};

use atomcount::counting::{
    bilinear_mean, binomial, fock_probabilities, fock_probabilities_with, homogeneous_mean_nn,
    joint_fock_probabilities_with, state_probabilities, supersolid_mean_nn, total_variation, CountingOptions,
    KInterpretation,
};
use atomcount::lattice::{make_pattern, make_supersolid, DetectorBox, LatticeGeometry, ManyBodyState, PatternKind, PhysicalParams};
use atomcount::oracle::FockOracle;
use atomcount::propagation::{correlation_matrix, gaussian_phase_segment, quadrature_segment_oracle, PropagationMode};
use atomcount::scenario::{compute, figure, RunReport};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn criterion(n: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
        .unwrap_or_else(|_| outcome(false, "panicked"));
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    println!("{verdict} {n:>2} {name}: {} [{:.2?}]", o.detail, t.elapsed());
    o.pass
}

fn params() -> PhysicalParams {
    PhysicalParams::default()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn binomial_law(n: usize, a: f64, m: usize) -> f64 {
    binomial(n, m) * a.powi(m as i32) * (1.0 - a).powi((n - m) as i32)
}

fn closed_form_binomial() -> Outcome {
    let mut rng = common::rng(1);
    let mut worst = 0.0f64;
    let mut worst_permanent = 0.0f64;
    let mut t_default = Duration::ZERO;
    let start_perm = Instant::now();
    for n in 1..=16 {
        for k in 0..50 {
            let ad: f64 = rng.random_range(0.0..1.0);
            let a = DMatrix::from_diagonal_element(n, n, c(ad));
            let t = Instant::now();
            let d = fock_probabilities(&a, &vec![1; n]).unwrap();
            t_default += t.elapsed();
            for m in 0..=n {
                worst = worst.max((d.get(m) - binomial_law(n, ad, m)).abs());
            }
            // the permanent path on the same input, for a subset of draws
            if k % 10 == 0 {
                let d = fock_probabilities_with(&a, &vec![1; n], &CountingOptions::exact()).unwrap();
                for m in 0..=n {
                    worst_permanent = worst_permanent.max((d.get(m) - binomial_law(n, ad, m)).abs());
                }
            }
        }
    }
    let t_perm = start_perm.elapsed() - t_default;
    outcome(
        worst < 1e-10 && worst_permanent < 1e-10 && t_default < Duration::from_secs(1),
        format!(
            "max |Δp| = {worst:.1e} in {t_default:.2?} over 800 draws; permanent path max |Δp| = {worst_permanent:.1e} ({t_perm:.2?}, 160 draws)"
        ),
    )
}

fn trinomial(n: usize, a: f64, m: usize, k: usize) -> f64 {
    if m + k > n {
        return 0.0;
    }
    binomial(n, m) * binomial(n - m, k) * a.powi((m + k) as i32) * (1.0 - 2.0 * a).powi((n - m - k) as i32)
}

fn closed_form_trinomial() -> Outcome {
    let mut rng = common::rng(2);
    let (mut worst, mut worst_sum, mut worst_cov) = (0.0f64, 0.0f64, 0.0f64);
    let t = Instant::now();
    for n in 1..=12 {
        for _ in 0..5 {
            let ad: f64 = rng.random_range(0.0..0.5);
            let a = DMatrix::from_diagonal_element(n, n, c(ad));
            for opts in [CountingOptions::default(), CountingOptions::exact()] {
                let j = joint_fock_probabilities_with(&a, &a, &vec![1; n], &opts).unwrap();
                for m in 0..=n {
                    for k in 0..=n {
                        worst = worst.max((j.get(m, k) - trinomial(n, ad, m, k)).abs());
                    }
                }
                worst_sum = worst_sum.max((j.probabilities.sum() - 1.0).abs());
                worst_cov = worst_cov.max((j.covariance + n as f64 * ad * ad).abs());
            }
        }
    }
    let elapsed = t.elapsed();
    outcome(
        worst < 1e-10 && worst_sum < 1e-10 && worst_cov < 1e-10 && elapsed < Duration::from_secs(10),
        format!("max |Δp| = {worst:.1e}, |Σp - 1| = {worst_sum:.1e}, |cov + N A_d²| = {worst_cov:.1e}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut rng = common::rng(3);
    let lambdas = [0.25, 0.5, 0.75, 1.0];
    let mut worst = 0.0f64;
    let mut evaluations = 0;
    for trial in 0..100 {
        let n = 2 + trial % 7;
        let a = common::random_psd(n, 0.0, 1.0, &mut rng);
        let chain = LatticeGeometry::chain(n, LatticeGeometry::DEFAULT_SPACING).unwrap();
        // total |α|² ≤ 0.3 keeps the coherent truncation within the guard
        let scale = (0.3 / n as f64).sqrt();
        let mut amp = || Complex64::from_polar(scale * rng.random_range(0.2..1.0), rng.random_range(0.0..std::f64::consts::TAU));
        let coherent: Vec<Complex64> = (0..n).map(|_| amp()).collect();
        let (beta, gamma) = (amp(), amp());
        let pattern: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let particles = rng.random_range(1..=n);
        let states = [
            ManyBodyState::unit_filling(n),
            make_pattern(PatternKind::Checkerboard, &chain).unwrap(),
            make_pattern(PatternKind::Striped, &chain).unwrap(),
            ManyBodyState::FockPattern { occupations: pattern },
            ManyBodyState::CoherentProduct { amplitudes: coherent },
            make_supersolid(&chain, beta, gamma),
            ManyBodyState::SymmetricSuperposition { particles, sites: n },
        ];
        for state in &states {
            let dist = state_probabilities(&a, state, &CountingOptions::exact(), KInterpretation::Complete).unwrap();
            let mut oracle = FockOracle::for_state(state).unwrap();
            for l in lambdas {
                let q = oracle.generating(&[(l, &a)], state).unwrap();
                worst = worst.max((q - dist.generating(l)).abs());
                evaluations += 1;
            }
        }
    }
    outcome(worst < 1e-8, format!("max |ΔQ| = {worst:.1e} over {evaluations} evaluations, N_s = 2..8"))
}

fn integral_correctness() -> Outcome {
    let mut rng = common::rng(4);
    let mut worst = 0.0f64;
    let mut max_qw = 0.0f64;
    for k in 0..1000 {
        let w: f64 = 10f64.powf(rng.random_range(-4.0..0.0));
        let c: f64 = rng.random_range(-1.0..1.0) * w;
        // endpoints within three widths of the centre
        let (u1, u2): (f64, f64) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        if (u1 - u2).abs() < 1e-3 {
            continue;
        }
        let (a, b) = (c + u1.min(u2) * w, c + u1.max(u2) * w);
        let qw = if k % 4 == 0 { 50.0 * rng.random_range(0.9..1.0) } else { rng.random_range(0.0..50.0) };
        let q = qw / w * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        max_qw = max_qw.max(qw);
        let closed = gaussian_phase_segment(a, b, c, w, q).unwrap();
        let reference = quadrature_segment_oracle(a, b, c, w, q, 1e-14).unwrap();
        worst = worst.max((closed - reference).norm() / reference.norm());
    }
    outcome(worst < 1e-9, format!("max relative error {worst:.1e} over 1000 draws, qw up to {max_qw:.1}"))
}

fn matrix_physics() -> Outcome {
    let p = params();
    // (a) whole-space detector
    let cube = LatticeGeometry::new([2, 2, 3], LatticeGeometry::DEFAULT_SPACING).unwrap();
    let all = DetectorBox::below(0.01, [1.0, 1.0, 1.0], 1.0).unwrap();
    let a = correlation_matrix(&cube, &all, &p, PropagationMode::Exact).unwrap().entries;
    let diag_dev = (0..a.nrows()).map(|i| (a[(i, i)].re - 1.0).abs()).fold(0.0, f64::max);
    let off = (0..a.nrows())
        .flat_map(|i| (0..a.ncols()).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| a[(i, j)].norm())
        .fold(0.0, f64::max);
    let pass_a = diag_dev < 1e-8 && off < 1e-6;
    // (b) interference at Fig. 1 parameters for dz >= 0.2 mm
    let chain = LatticeGeometry::vertical_chain(12, LatticeGeometry::DEFAULT_SPACING).unwrap();
    let mut ratios = Vec::new();
    for dz in [2e-4, 3e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2] {
        let det = DetectorBox::below(0.01, [0.01, 0.01, dz], 1.0).unwrap();
        let e = correlation_matrix(&chain, &det, &p, PropagationMode::Exact).unwrap().entries;
        let r = (0..11).map(|i| e[(i, i + 1)].norm() / e[(i, i)].re).fold(0.0, f64::max);
        ratios.push((dz, r));
    }
    let (dz_worst, r_worst) = ratios.iter().copied().fold((0.0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let pass_b = r_worst < 0.05;
    let first_below = ratios.iter().find(|(_, r)| *r < 0.05).map(|(dz, _)| *dz);
    // (c) expanded width
    let ctx = atomcount::propagation::ExpansionContext::at_distance(0.01, &p).unwrap();
    let pass_c = (ctx.width / 0.8e-3 - 1.0).abs() < 0.05;
    outcome(
        pass_a && pass_b && pass_c,
        format!(
            "(a) {} max|A_ii - 1| = {diag_dev:.1e}, max|A_ij| = {off:.1e}; (b) {} max |A_i,i+1|/A_ii = {r_worst:.3} at dz = {dz_worst:e} m, first below 0.05 at dz = {}; (c) {} ω_t = {:.4} mm",
            if pass_a { "ok" } else { "FAIL" },
            if pass_b { "ok" } else { "FAIL" },
            first_below.map(|d| format!("{d:e} m")).unwrap_or_else(|| "none".into()),
            if pass_c { "ok" } else { "FAIL" },
            ctx.width * 1e3
        ),
    )
}

fn state_column<'a>(report: &'a RunReport, label: &str) -> Vec<&'a atomcount::scenario::StateResult> {
    (0..report.points.len()).map(|k| report.state(k, label).unwrap()).collect()
}

fn fig2_fig3_shape() -> Outcome {
    let fig2 = compute(&figure(2).unwrap()).unwrap();
    let fig3 = compute(&figure(3).unwrap()).unwrap();
    let mut notes = Vec::new();
    let mut pass = true;
    let mut check = |ok: bool, what: String| {
        pass &= ok;
        if !ok {
            notes.push(what);
        }
    };
    let mut poisson_dev = 0.0f64;
    for report in [&fig2, &fig3] {
        let (mi, sf) = (state_column(report, "mi"), state_column(report, "sf"));
        for (k, (m, s)) in mi.iter().zip(&sf).enumerate() {
            let (dm, ds) = (&m.distribution, &s.distribution);
            poisson_dev = poisson_dev.max((ds.mean - ds.variance).abs());
            check(dm.variance < dm.mean, format!("MI not subpoissonian at point {k}"));
            check(dm.variance < ds.variance, format!("MI variance not below SF at point {k}"));
            if k > 0 {
                check(dm.mean < mi[k - 1].distribution.mean, format!("MI mean not decreasing at point {k}"));
                check(ds.mean < sf[k - 1].distribution.mean, format!("SF mean not decreasing at point {k}"));
            }
        }
    }
    check(poisson_dev < 1e-12, format!("SF |mean - variance| = {poisson_dev:e}"));
    // the on-site regime drops off-diagonals; the exact moments with them
    // included must tell the same story
    let cube = LatticeGeometry::new([3, 3, 3], LatticeGeometry::DEFAULT_SPACING).unwrap();
    let mut full_fano = Vec::new();
    for z0 in [0.01, 0.03, 0.05] {
        let det = DetectorBox::below(z0, [2e-3, 2e-3, 0.02], 1.0).unwrap();
        let a = correlation_matrix(&cube, &det, &params(), PropagationMode::Exact).unwrap().entries;
        let (mean, var) = atomcount::counting::fock_moments(&a);
        let sf = bilinear_mean(&a, &[c(1.0); 27]).unwrap();
        check(var < mean && var < sf, format!("full-matrix MI moments at z0 = {z0}"));
        full_fano.push(var / mean);
    }
    let mi_fano: Vec<String> = state_column(&fig2, "mi").iter().map(|s| format!("{:.3}", s.distribution.fano_factor())).collect();
    outcome(
        pass,
        format!(
            "MI Fano at z0 = 1,3,5 cm: {} (full A: {}); SF |mean - var| ≤ {poisson_dev:.1e}; {} Fig. 3 points{}",
            mi_fano.join(", "),
            full_fano.iter().map(|f| format!("{f:.3}")).collect::<Vec<_>>().join(", "),
            fig3.points.len(),
            if notes.is_empty() { String::new() } else { format!("; {}", notes.join("; ")) }
        ),
    )
}

fn fig5_shape() -> Outcome {
    let report = compute(&figure(5).unwrap()).unwrap();
    let delta = 0.02;
    let xs: Vec<f64> = report.points.iter().map(|p| p.axis_value.unwrap()).collect();
    let mi = state_column(&report, "mi");
    let sf = state_column(&report, "sf");
    let corr: Vec<f64> = mi.iter().map(|s| s.corr().abs()).collect();
    let pearson: Vec<f64> = mi.iter().map(|s| s.pearson().abs()).collect();
    let peak = corr[0];
    let tol = 1e-9 * peak;
    let maximal = corr.iter().all(|&v| v <= peak + tol);
    let mut first_rise = None;
    for k in 1..corr.len() {
        if !(corr[k] <= corr[k - 1] + tol) && first_rise.is_none() {
            first_rise = Some(xs[k]);
        }
    }
    let beyond: Vec<f64> = xs.iter().zip(&corr).filter(|(x, _)| **x > delta).map(|(_, v)| *v).collect();
    let far_max = beyond.iter().copied().fold(0.0, f64::max);
    let far_ok = !beyond.is_empty() && beyond.iter().all(|v| v.is_finite() && *v < 0.1 * peak);
    let sf_zero = sf.iter().all(|s| s.joint.as_ref().unwrap().covariance == 0.0 && s.corr() == 0.0);
    let pearson_far = xs.iter().zip(&pearson).filter(|(x, _)| **x > delta).map(|(_, v)| *v).fold(0.0, f64::max);
    outcome(
        maximal && first_rise.is_none() && far_ok && sf_zero,
        format!(
            "|corr| peak {peak:.4} at x_d = 0 (maximal: {maximal}); monotone: {}; max |corr| for x_d > Δ = {far_max:.4} = {:.0}% of peak; SF corr exactly 0: {sf_zero}; Pearson |r| peak {:.3}, beyond Δ {pearson_far:.1e}",
            first_rise.map(|x| format!("no, rises at x_d = {x}")).unwrap_or_else(|| "yes".into()),
            100.0 * far_max / peak,
            pearson[0]
        ),
    )
}

/// Total-variation distance at the caption geometry, recorded from this
/// implementation; the regression check guards it to 1%.
const FIG6_TV_NARROW: f64 = 1.2494e-4;

fn fig6_distinguishability() -> Outcome {
    let report = compute(&figure(6).unwrap()).unwrap();
    let tv: Vec<f64> = (0..report.points.len())
        .map(|k| {
            let a = &report.state(k, "checkerboard").unwrap().distribution;
            let b = &report.state(k, "blocks").unwrap().distribution;
            total_variation(a, b)
        })
        .collect();
    let (narrow, tall) = (tv[0], tv[1]);
    let regression = (narrow / FIG6_TV_NARROW - 1.0).abs() < 0.01;
    let p0 = report.state(0, "checkerboard").unwrap().distribution.get(0);
    outcome(
        narrow > 0.1 && tall < 1e-3 && regression,
        format!(
            "TV(dz = 0.02 mm) = {narrow:.4e} (needs > 0.1; bounded by 1 - p(0) = {:.3}; regression value {FIG6_TV_NARROW:e} {}); TV(dz = 2 cm) = {tall:.1e} {}",
            1.0 - p0,
            if regression { "held" } else { "MOVED" },
            if tall < 1e-3 { "< 1e-3" } else { ">= 1e-3" }
        ),
    )
}

fn supersolid() -> Outcome {
    // a chain whose couplings fall off fast enough that next-nearest
    // neighbours are below 1% of nearest neighbours
    let n = 24;
    let (ad, r) = (0.05, 0.2f64);
    let a = DMatrix::from_fn(n, n, |i, j| c(ad * r.powi((i.abs_diff(j) * i.abs_diff(j)) as i32)));
    let nnn_ratio = a[(0, 2)].norm() / a[(0, 1)].norm();
    let geometry = LatticeGeometry::vertical_chain(n, LatticeGeometry::DEFAULT_SPACING).unwrap();
    let (beta, gamma) = (c(0.5f64.sqrt()), c(1.5f64.sqrt()));
    let ManyBodyState::CoherentProduct { amplitudes } = make_supersolid(&geometry, beta, gamma) else { unreachable!() };
    let exact_ss = bilinear_mean(&a, &amplitudes).unwrap();
    let exact_sf = bilinear_mean(&a, &[c(1.0); 24]).unwrap();
    let err_ss = (supersolid_mean_nn(&a, beta, gamma, n) / exact_ss - 1.0).abs();
    let err_sf = (homogeneous_mean_nn(&a, c(1.0), n) / exact_sf - 1.0).abs();
    let nn_ok = nnn_ratio < 0.01 && err_ss < 0.02 && err_sf < 0.02;

    let report = compute(&figure(7).unwrap()).unwrap();
    let ss = &report.state(0, "ss").unwrap().distribution;
    let sf = &report.state(0, "sf").unwrap().distribution;
    let ordered = ss.mean < sf.mean;
    outcome(
        nn_ok && ordered,
        format!(
            "NN approximation error {:.2}% (supersolid), {:.2}% (superfluid) at |A_NNN|/|A_NN| = {nnn_ratio:.4}; Fig. 7 means ss {:.4} < sf {:.4}: {ordered}, TV {:.3}",
            100.0 * err_ss,
            100.0 * err_sf,
            ss.mean,
            sf.mean,
            total_variation(ss, sf)
        ),
    )
}

fn performance() -> Outcome {
    let det = DetectorBox::below(0.01, [1e-3, 1e-3, 2e-5], 1.0).unwrap();
    let mut times = Vec::new();
    for p in [16, 20] {
        let chain = LatticeGeometry::vertical_chain(p, LatticeGeometry::DEFAULT_SPACING).unwrap();
        let a = correlation_matrix(&chain, &det, &params(), PropagationMode::Exact).unwrap().entries;
        let t = Instant::now();
        let d = fock_probabilities_with(&a, &vec![1; p], &CountingOptions::exact()).unwrap();
        times.push((p, t.elapsed(), d.probabilities.len()));
    }
    let threads = rayon::current_num_threads();
    let (t16, t20) = (times[0].1, times[1].1);
    outcome(
        t16 < Duration::from_secs(10) && t20 < Duration::from_secs(300),
        format!("P = 16 in {t16:.2?}, P = 20 in {t20:.2?} on {threads} threads"),
    )
}

fn main() {
    // `cargo test` passes harness flags such as `--quiet`; none apply here
    println!("acceptance criteria");
    let results = [
        criterion(1, "closed-form binomial", closed_form_binomial),
        criterion(2, "closed-form trinomial", closed_form_trinomial),
        criterion(3, "oracle equivalence", oracle_equivalence),
        criterion(4, "segment integral", integral_correctness),
        criterion(5, "correlation-matrix physics", matrix_physics),
        criterion(6, "Fig. 2/3 shape", fig2_fig3_shape),
        criterion(7, "Fig. 5 shape", fig5_shape),
        criterion(8, "Fig. 6 distinguishability", fig6_distinguishability),
        criterion(9, "supersolid", supersolid),
        criterion(10, "performance", performance),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/10 criteria pass");
    if passed < results.len() {
        std::process::exit(1);
    }
}
