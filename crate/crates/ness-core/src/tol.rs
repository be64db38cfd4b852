//! Numerical tolerances used across the crate.
//!
//! Every threshold that appears in a contract (construction guards,
//! residual certification, pseudo-inverse cuts) is named here once.

/// Hermiticity / antisymmetry violations up to this size are projected away
/// on construction; anything larger is a structural-input error.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// Correlation eigenvalues within this distance outside [-1, 1] are clipped.
pub const EIGENVALUE_CLIP: f64 = 1e-10;

/// Guard for pure directions: |c| >= 1 - PURE_GUARD rejects the G and T
/// parametrizations and the mixed-state fidelity formula.
pub const PURE_GUARD: f64 = 1e-8;

/// Relative residual certification for Sylvester solves:
/// ||XC + CX^T - Y||_2 <= RESIDUAL_TOL * max(1, ||Y||_2).
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Pseudo-inverse cut in the metric sum: terms with |1 - c_r c_s| below this
/// are skipped. Their contribution vanishes in the pure limit.
pub const METRIC_SKIP: f64 = 1e-10;

/// Real parts below this are treated as marginally stable and the gap is
/// reported as zero.
pub const MARGINAL_RE: f64 = 1e-12;

/// Eigenvector-matrix condition numbers above this flag the spectrum as
/// effectively non-diagonalizable.
pub const DIAGONALIZABLE_COND: f64 = 1e8;

/// Mode cap for the dense oracle (operator space grows as 4^n).
pub const ORACLE_MODE_CAP: usize = 4;

/// Mode cap for the Kronecker-vectorized Sylvester route.
pub const VECTORIZED_MODE_CAP: usize = 32;

/// Enumeration budget for the restricted Liouvillean spectrum.
pub const SPECTRUM_BUDGET: usize = 2_000_000;

/// Dispersion values below this count as an exactly gapless momentum (the
/// analytic ring formulas are singular there). Honest near-critical grids
/// sit many orders of magnitude above; only representation noise of a true
/// coincidence falls below.
pub const GAPLESS_OMEGA: f64 = 1e-12;
