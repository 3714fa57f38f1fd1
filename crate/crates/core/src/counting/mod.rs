//! Counting distributions from generating functions.
//!
//! Fock patterns go through permanents of the occupied block of `A`,
//! coherent products through the Poissonian closed form, and symmetric
//! superpositions through an explicit pattern-pair expansion.

mod coherent;
mod distribution;
mod fock;
mod generating;
mod joint;
mod permanent;
mod superposition;

pub use coherent::{
    bilinear_mean, coherent_probabilities, homogeneous_mean_nn, supersolid_mean_nn, uniform_diagonal_and_nn,
};
pub use distribution::{
    moments_and_corr, total_variation, CountingDistribution, JointDistribution, JointMoments, NEGATIVE_TOL,
    NORMALISATION_TOL,
};
pub use fock::{
    fock_covariance, fock_moments, fock_probabilities, fock_probabilities_with, occupied_block, poisson_binomial, CountingOptions, Extraction,
    CHEBYSHEV_MAX_DEGREE, SYMBOLIC_MAX_DEGREE,
};
pub use generating::{binomial, GeneratingPolynomial};
pub use joint::{joint_coherent_probabilities, joint_fock_probabilities, joint_fock_probabilities_with, MAX_JOINT_PARTICLES};
pub use permanent::{permanent, permanent_linear_pencil, principal_permanent_sums, MAX_PERMANENT_DIM};
pub use superposition::{
    matching_sums, superposition_generating, superposition_probabilities, KInterpretation, MAX_SUPERPOSITION_SITES,
};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::lattice::ManyBodyState;

/// Single-detector distribution for any state family.
pub fn state_probabilities(
    a: &DMatrix<Complex64>,
    state: &ManyBodyState,
    options: &CountingOptions,
    interpretation: KInterpretation,
) -> Result<CountingDistribution> {
    state.validate()?;
    match state {
        ManyBodyState::CoherentProduct { amplitudes } => coherent_probabilities(a, amplitudes),
        ManyBodyState::FockPattern { occupations } => fock_probabilities_with(a, occupations, options),
        ManyBodyState::SymmetricSuperposition { particles, sites } => {
            superposition_probabilities(a, *particles, *sites, interpretation)
        }
    }
}

/// Two-detector distribution. Symmetric superpositions are not covered.
pub fn state_joint_probabilities(
    a1: &DMatrix<Complex64>,
    a2: &DMatrix<Complex64>,
    state: &ManyBodyState,
    options: &CountingOptions,
) -> Result<JointDistribution> {
    state.validate()?;
    match state {
        ManyBodyState::CoherentProduct { amplitudes } => joint_coherent_probabilities(a1, a2, amplitudes),
        ManyBodyState::FockPattern { occupations } => joint_fock_probabilities_with(a1, a2, occupations, options),
        ManyBodyState::SymmetricSuperposition { .. } => Err(crate::Error::Domain(
            "joint counting is implemented for Fock patterns and coherent products only".into(),
        )),
    }
}
