//! Brute-force generating functions in a truncated Fock space.
//!
//! For Hermitian `M = Σ_k λ_k A_k` with eigenvalues below one,
//! `:exp(-a†Ma): = exp(a† log(I - M) a)`. The right-hand side is built as an
//! explicit many-body matrix on each number sector and exponentiated
//! numerically, so nothing here shares code with the permanent route in
//! [`crate::counting`].

mod expm;
mod space;

pub use space::{TruncatedFockSpace, MAX_DIMENSION};

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::counting::{
    binomial, superposition_generating, CountingDistribution, JointDistribution, KInterpretation,
};
use crate::error::{Error, Result};
use crate::lattice::ManyBodyState;
use crate::propagation::hermiticity_defect;
use space::Sector;

/// `log(1 - μ)` used for eigenvalues of `M` at one; `e^{80 n}` is far below
/// any tolerance, so this is the projection onto an empty singular mode.
pub const LOG_FLOOR: f64 = -80.0;
/// Eigenvalues of `M` in `[1 - SINGULAR_TOL, 1 + SINGULAR_TOL]` are treated as
/// exactly one; beyond that the identity does not hold.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Sectors up to this size are exponentiated densely.
pub const DENSE_LIMIT: usize = 64;
/// Tail mass of the total particle number dropped for coherent states.
pub const COHERENT_TAIL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpMethod {
    #[default]
    Auto,
    Dense,
    Lanczos,
}

/// `B = log(I - M)` by Hermitian eigendecomposition.
pub fn one_body_log(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if hermiticity_defect(m) > 1e-10 * scale {
        return Err(Error::Domain("weighted detector matrix is not Hermitian".into()));
    }
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut logs = Vec::with_capacity(eig.eigenvalues.len());
    for &mu in eig.eigenvalues.iter() {
        if mu > 1.0 + SINGULAR_TOL {
            return Err(Error::Domain(format!("eigenvalue {mu} of M exceeds one; log(I - M) undefined")));
        }
        logs.push(if mu >= 1.0 - SINGULAR_TOL { LOG_FLOOR } else { (1.0 - mu).ln() });
    }
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(logs.len(), logs.iter().map(|&l| Complex64::new(l, 0.0))));
    Ok(v * d * v.adjoint())
}

/// Reusable oracle over a fixed truncation; sector tables are built lazily
/// and shared by every evaluation.
#[derive(Debug)]
pub struct FockOracle {
    space: TruncatedFockSpace,
    sectors: BTreeMap<usize, Sector>,
    pub method: ExpMethod,
}

impl FockOracle {
    pub fn new(space: TruncatedFockSpace) -> Self {
        Self { space, sectors: BTreeMap::new(), method: ExpMethod::Auto }
    }

    /// Smallest truncation representing `state` (coherent states: total
    /// particle number up to the `1 - COHERENT_TAIL` quantile).
    pub fn for_state(state: &ManyBodyState) -> Result<Self> {
        state.validate()?;
        let sites = state.site_count();
        let p = match state.particle_number() {
            Some(p) => p,
            None => coherent_cutoff(state),
        };
        Ok(Self::new(TruncatedFockSpace::new(sites, p, p)?))
    }

    pub fn space(&self) -> TruncatedFockSpace {
        self.space
    }

    fn sector(&mut self, n: usize) -> &Sector {
        let space = self.space;
        self.sectors.entry(n).or_insert_with(|| Sector::build(&space, n))
    }

    /// `Q = <ψ| :exp(-Σ_k λ_k a†A_k a): |ψ>` for a normalised `ψ`.
    pub fn generating(&mut self, terms: &[(f64, &DMatrix<Complex64>)], state: &ManyBodyState) -> Result<f64> {
        let sites = self.space.sites;
        if state.site_count() != sites {
            return Err(Error::Domain(format!("state has {} sites, oracle {sites}", state.site_count())));
        }
        let mut m = DMatrix::<Complex64>::zeros(sites, sites);
        for (lambda, a) in terms {
            if a.shape() != (sites, sites) {
                return Err(Error::Domain(format!("matrix shape {:?} does not match {sites} sites", a.shape())));
            }
            m += *a * Complex64::new(*lambda, 0.0);
        }
        let b = one_body_log(&m)?;
        let mut total = 0.0;
        for (n, psi) in self.state_sectors(state)? {
            let method = self.method;
            let sector = self.sector(n);
            total += sector_expectation(sector, &b, &psi, method)?;
        }
        Ok(total)
    }

    /// Components of `state` in each number sector of the truncation.
    fn state_sectors(&mut self, state: &ManyBodyState) -> Result<Vec<(usize, Vec<Complex64>)>> {
        match state {
            ManyBodyState::FockPattern { occupations } => {
                let n = occupations.iter().map(|&k| k as usize).sum();
                let sector = self.sector(n);
                let mut psi = vec![Complex64::new(0.0, 0.0); sector.dim()];
                let k = sector.position(occupations).ok_or_else(|| Error::Domain("pattern outside truncation".into()))?;
                psi[k] = Complex64::new(1.0, 0.0);
                Ok(vec![(n, psi)])
            }
            ManyBodyState::SymmetricSuperposition { particles, sites } => {
                let sector = self.sector(*particles);
                let weight = 1.0 / binomial(*sites, *particles).sqrt();
                let psi = sector
                    .basis
                    .iter()
                    .map(|b| if b.iter().all(|&k| k <= 1) { Complex64::new(weight, 0.0) } else { Complex64::new(0.0, 0.0) })
                    .collect();
                Ok(vec![(*particles, psi)])
            }
            ManyBodyState::CoherentProduct { amplitudes } => {
                let vacuum = (-amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() / 2.0).exp();
                let mut out = Vec::new();
                for n in 0..=self.space.p_total {
                    let sector = self.sector(n);
                    let psi = sector
                        .basis
                        .iter()
                        .map(|b| {
                            let mut c = Complex64::new(vacuum, 0.0);
                            for (k, &nk) in b.iter().enumerate() {
                                c *= amplitudes[k].powu(nk as u32) / factorial(nk as usize).sqrt();
                            }
                            c
                        })
                        .collect();
                    out.push((n, psi));
                }
                Ok(out)
            }
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Total particle number at which the Poisson tail of `Σ|α|²` drops below
/// [`COHERENT_TAIL`].
fn coherent_cutoff(state: &ManyBodyState) -> usize {
    let ManyBodyState::CoherentProduct { amplitudes } = state else { return 0 };
    let mu: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let mut term = (-mu).exp();
    let mut cdf = term;
    let mut n = 0;
    while 1.0 - cdf > COHERENT_TAIL && n < 10_000 {
        n += 1;
        term *= mu / n as f64;
        cdf += term;
        // guard against the cdf saturating in floating point
        if term < COHERENT_TAIL * 1e-3 && n as f64 > mu {
            break;
        }
    }
    n
}

fn sector_expectation(sector: &Sector, b: &DMatrix<Complex64>, psi: &[Complex64], method: ExpMethod) -> Result<f64> {
    if psi.iter().all(|z| z.norm_sqr() == 0.0) {
        return Ok(0.0);
    }
    let d = sector.dim();
    let dense = match method {
        ExpMethod::Auto => d <= DENSE_LIMIT,
        ExpMethod::Dense => true,
        ExpMethod::Lanczos => false,
    };
    if dense {
        let mut h = DMatrix::<Complex64>::zeros(d, d);
        for hop in &sector.hops {
            h[(hop.row as usize, hop.col as usize)] += b[(hop.i as usize, hop.j as usize)] * hop.factor;
        }
        Ok(expm::expectation_dense(&h, psi))
    } else {
        expm::expectation_lanczos(
            |x, y| {
                y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                for hop in &sector.hops {
                    y[hop.row as usize] += b[(hop.i as usize, hop.j as usize)] * hop.factor * x[hop.col as usize];
                }
            },
            psi,
        )
    }
}

/// One-shot `Q` for weighted detector matrices.
pub fn oracle_generating(terms: &[(f64, &DMatrix<Complex64>)], state: &ManyBodyState) -> Result<f64> {
    FockOracle::for_state(state)?.generating(terms, state)
}

/// Largest particle number for which the real-node interpolation is used.
pub const MAX_ORACLE_DEGREE: usize = 10;

fn real_nodes(n: usize) -> Vec<f64> {
    (0..n).map(|k| 0.5 * (1.0 + (PI * (2 * k + 1) as f64 / (2 * n) as f64).cos())).collect()
}

fn fixed_particle_number(state: &ManyBodyState) -> Result<usize> {
    let p = state
        .particle_number()
        .ok_or_else(|| Error::Domain("oracle distributions need a fixed particle number".into()))?;
    if p > MAX_ORACLE_DEGREE {
        return Err(Error::Capacity { what: "oracle interpolation degree", got: p, limit: MAX_ORACLE_DEGREE });
    }
    Ok(p)
}

/// `p(m)` from `Q(1-s)` sampled at `P+1` Chebyshev nodes `s ∈ [0, 1]`.
pub fn oracle_distribution(a: &DMatrix<Complex64>, state: &ManyBodyState) -> Result<CountingDistribution> {
    let p = fixed_particle_number(state)?;
    let mut oracle = FockOracle::for_state(state)?;
    let nodes = real_nodes(p + 1);
    let values: Vec<f64> =
        nodes.iter().map(|&s| oracle.generating(&[(1.0 - s, a)], state)).collect::<Result<_>>()?;
    let coeffs = solve_vandermonde(&nodes, &DMatrix::from_column_slice(p + 1, 1, &values))?;
    CountingDistribution::from_probabilities(coeffs.column(0).iter().copied().collect())
}

/// `p(m, n)` from `Q(1-s, 1-t)` on a tensor grid of Chebyshev nodes.
pub fn oracle_joint_distribution(
    a1: &DMatrix<Complex64>,
    a2: &DMatrix<Complex64>,
    state: &ManyBodyState,
) -> Result<JointDistribution> {
    let p = fixed_particle_number(state)?;
    let mut oracle = FockOracle::for_state(state)?;
    let nodes = real_nodes(p + 1);
    let mut grid = DMatrix::zeros(p + 1, p + 1);
    for (k, &s) in nodes.iter().enumerate() {
        for (l, &t) in nodes.iter().enumerate() {
            grid[(k, l)] = oracle.generating(&[(1.0 - s, a1), (1.0 - t, a2)], state)?;
        }
    }
    // V X Vᵀ = G
    let half = solve_vandermonde(&nodes, &grid)?;
    let table = solve_vandermonde(&nodes, &half.transpose())?.transpose();
    JointDistribution::from_table(table)
}

fn solve_vandermonde(nodes: &[f64], rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = nodes.len();
    let v = DMatrix::from_fn(n, n, |i, j| nodes[i].powi(j as i32));
    v.lu().solve(rhs).ok_or_else(|| Error::Invariant("singular node matrix".into()))
}

/// Largest deviation of each `K` reading from the oracle over
/// `λ ∈ {0.25, 0.5, 0.75, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpretationDiscrepancy {
    pub interpretation: KInterpretation,
    pub max_abs_error: f64,
}

pub fn interpretation_report(
    a: &DMatrix<Complex64>,
    particles: usize,
    sites: usize,
) -> Result<Vec<InterpretationDiscrepancy>> {
    let state = ManyBodyState::SymmetricSuperposition { particles, sites };
    let mut oracle = FockOracle::for_state(&state)?;
    let lambdas = [0.25, 0.5, 0.75, 1.0];
    let reference: Vec<f64> = lambdas.iter().map(|&l| oracle.generating(&[(l, a)], &state)).collect::<Result<_>>()?;
    KInterpretation::ALL
        .iter()
        .map(|&interpretation| {
            let q = superposition_generating(a, particles, sites, interpretation)?;
            let max_abs_error = lambdas
                .iter()
                .zip(&reference)
                .map(|(&l, r)| (q.eval(Complex64::new(l, 0.0)).re - r).abs())
                .fold(0.0, f64::max);
            Ok(InterpretationDiscrepancy { interpretation, max_abs_error })
        })
        .collect()
}
