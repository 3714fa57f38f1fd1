//! Exact atom-counting statistics for bosons released from an optical
//! lattice and detected after free fall.
//!
//! The pipeline has three stages:
//!
//! 1. [`lattice`] describes the lattice, the detector boxes and the initial
//!    many-body state (Mott patterns, coherent products, symmetric
//!    superpositions).
//! 2. [`propagation`] turns geometry and detector into the Hermitian
//!    correlation matrix `A_ij`, the detector-restricted overlap of the
//!    expanded orbitals.
//! 3. [`counting`] evaluates the generating function
//!    `Q(λ) = <:exp(-λ a†Aa):>` and extracts single and joint counting
//!    distributions from it.
//!
//! [`oracle`] recomputes every generating function by brute-force operator
//! algebra in a truncated Fock space, and [`scenario`] drives complete runs
//! from configuration files.

pub mod counting;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod propagation;
pub mod scenario;

pub use error::{Error, Result};
