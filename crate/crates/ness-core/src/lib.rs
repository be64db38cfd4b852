//! Non-equilibrium steady states of quadratic fermionic Lindblad dynamics.
//!
//! The library is organized around the pipeline that maps a control-parameter
//! point to geometric and spectral observables of its steady state:
//!
//! 1. [`models`] builds a [`lindblad::QuadraticLindbladian`] (Hamiltonian
//!    matrix `H` plus linear jump-operator coefficients) for a concrete model,
//! 2. [`lindblad`] derives the structure matrices `X`, `Y`, `M` and the
//!    spectral gap of the generator,
//! 3. [`sylvester`] solves `X C + C Xᵀ = Y` for the steady-state Majorana
//!    correlation matrix `C` and its parameter derivatives,
//! 4. [`metric`] evaluates the fidelity line element, the metric tensor over
//!    the parameter manifold, and the gap-based upper bounds,
//! 5. [`scaling`] runs finite-size scaling fits and phase-diagram sweeps.
//!
//! [`oracle`] provides brute-force dense ground truth for tiny systems and is
//! the correctness anchor for every convention choice in the fast path.
//! [`instances`] generates seeded random test instances.
//!
//! Grid sweeps and multi-size scaling runs are data-parallel; with the
//! default `parallel` feature they fan out over a rayon pool, without it the
//! same entry points run sequentially.

pub mod error;
pub mod gaussian;
pub mod instances;
pub mod linalg;
pub mod lindblad;
pub mod metric;
pub mod models;
pub mod oracle;
pub mod par;
pub mod scaling;
pub mod sylvester;
pub mod tol;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense real matrix.
pub type RMat = nalgebra::DMatrix<f64>;
