//! Error taxonomy shared by all modules.

/// Errors produced by the library.
///
/// The CLI maps these onto its documented exit codes: non-unique steady
/// states to 3, tolerance/numerical failures to 4, size caps to 5.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Input matrix violates a structural requirement (symmetry class,
    /// realness, positivity) beyond the construction tolerance.
    #[error("structural input error: {0}")]
    StructuralInput(String),

    /// Shapes of related inputs do not match.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A correlation eigenvalue sits on (or too close to) ±1, where the
    /// G/T parametrizations and the mixed-state fidelity formula diverge.
    #[error("pure direction: |c| = {value} is within {tol:e} of 1")]
    PureDirection { value: f64, tol: f64 },

    /// The spectral gap is not positive, so the steady state is not unique.
    #[error("non-unique steady state: gap delta = {delta:e} is not positive")]
    NonUniqueSteadyState { delta: f64 },

    /// A certified solve exceeded its residual tolerance.
    #[error("residual {residual:e} exceeds tolerance {tol:e}")]
    ResidualTolerance { residual: f64, tol: f64 },

    /// A brute-force or combinatorial routine was asked for more than its cap.
    #[error("size cap exceeded for {what}: {n} > {cap}")]
    SizeCap {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    /// The X-spectrum has eigenvalues with negative real part.
    #[error("unstable spectrum: min Re x = {min_re:e} < 0")]
    UnstableSpectrum { min_re: f64 },

    /// The analytic ring formulas hit an exactly gapless momentum.
    #[error("singular momentum modes k = {ks:?}: dispersion vanishes exactly")]
    SingularMomentum { ks: Vec<usize> },

    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative dense eigenvalue routine failed to converge.
    #[error("eigensolver did not converge: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
