//! Gaussian fermionic states through their Majorana correlation matrix.
//!
//! A state of `n` modes is described by the `2n x 2n` matrix
//! `C_ij = 1/2 <[w_i, w_j]>` over the Majorana operators `w_1..w_2n`, with
//! the index convention `w_l = f_l + f_l†`, `w_{n+l} = i(f_l - f_l†)`.
//! `C` is Hermitian and transpose-antisymmetric (hence purely imaginary)
//! with eigenvalues in `[-1, 1]` coming in `±c` pairs.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, HermitianEig};
use crate::{tol, CMat, RMat, C64};

/// Majorana two-point correlation matrix of a Gaussian fermionic state.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    n: usize,
    data: CMat,
}

impl CorrelationMatrix {
    /// Validates and stores a correlation matrix.
    ///
    /// Hermiticity/antisymmetry violations up to [`tol::STRUCTURE_TOL`] are
    /// projected away (solver output carries round-off); larger violations
    /// are structural errors. The spectral radius may exceed 1 by at most
    /// [`tol::PURE_GUARD`].
    pub fn new(data: CMat) -> Result<Self> {
        let dim = data.nrows();
        if data.ncols() != dim || dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "correlation matrix must be 2n x 2n, got {}x{}",
                dim,
                data.ncols()
            )));
        }
        let projected = project_imag_antisymmetric(&data);
        let violation = (&data - &projected)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if violation > tol::STRUCTURE_TOL {
            return Err(Error::StructuralInput(format!(
                "correlation matrix is not imaginary antisymmetric: deviation {violation:e}"
            )));
        }
        let c = Self {
            n: dim / 2,
            data: projected,
        };
        let radius = c.spectral_norm();
        if radius > 1.0 + tol::PURE_GUARD {
            return Err(Error::StructuralInput(format!(
                "correlation spectral radius {radius} exceeds 1"
            )));
        }
        Ok(c)
    }

    /// Zero correlations: the maximally mixed state.
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            data: CMat::zeros(2 * n, 2 * n),
        }
    }

    /// Builds `C = iK` from a real antisymmetric `K` (projected exactly).
    pub fn from_real_antisymmetric(k: &RMat) -> Result<Self> {
        let dim = k.nrows();
        let ka = (k - k.transpose()).scale(0.5);
        Self::new(CMat::from_fn(dim, dim, |i, j| C64::new(0.0, ka[(i, j)])))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.data
    }

    /// Eigendecomposition of the (Hermitian) correlation matrix.
    pub fn eig(&self) -> HermitianEig {
        let mut eig = hermitian_eig(&self.data);
        for v in eig.values.iter_mut() {
            *v = clip_unit(*v);
        }
        eig
    }

    /// Eigenvalues ascending, clipped to `[-1, 1]`.
    pub fn eigenvalues(&self) -> DVector<f64> {
        self.eig().values
    }

    /// Spectral radius: the operator norm `||C||_inf`.
    pub fn spectral_norm(&self) -> f64 {
        hermitian_eig(&self.data)
            .values
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }

    /// Whether `C^2 = 1` holds to the given tolerance (pure state).
    pub fn is_pure(&self, tolerance: f64) -> bool {
        self.eigenvalues()
            .iter()
            .all(|c| (c.abs() - 1.0).abs() <= tolerance)
    }
}

/// Projection onto purely imaginary antisymmetric (Hermitian) matrices:
/// Hermitian part first, then transpose-antisymmetrization.
fn project_imag_antisymmetric(a: &CMat) -> CMat {
    let herm = (a + a.adjoint()).scale(0.5);
    (&herm - herm.transpose()).scale(0.5)
}

fn clip_unit(v: f64) -> f64 {
    v.clamp(-1.0, 1.0)
}

/// Exponent matrix of the Gaussian ansatz `rho ∝ exp(-(i/4) Σ K_ij w_i w_j)`
/// with `K = iG` real antisymmetric; `G` itself is imaginary antisymmetric.
#[derive(Debug, Clone)]
pub struct GMatrix {
    n: usize,
    data: CMat,
}

impl GMatrix {
    pub fn new(data: CMat) -> Result<Self> {
        let dim = data.nrows();
        if data.ncols() != dim || dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "G must be 2n x 2n, got {}x{}",
                dim,
                data.ncols()
            )));
        }
        let projected = project_imag_antisymmetric(&data);
        let violation = (&data - &projected)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if violation > tol::STRUCTURE_TOL {
            return Err(Error::StructuralInput(format!(
                "G is not imaginary antisymmetric: deviation {violation:e}"
            )));
        }
        Ok(Self {
            n: dim / 2,
            data: projected,
        })
    }

    /// Builds `G` from the real antisymmetric `K = iG`.
    pub fn from_real_antisymmetric(k: &RMat) -> Result<Self> {
        let dim = k.nrows();
        let ka = (k - k.transpose()).scale(0.5);
        // G = -iK
        Self::new(CMat::from_fn(dim, dim, |i, j| C64::new(0.0, -ka[(i, j)])))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.data
    }

    /// The real antisymmetric `K = iG`.
    pub fn real_antisymmetric(&self) -> RMat {
        let dim = 2 * self.n;
        RMat::from_fn(dim, dim, |i, j| (C64::i() * self.data[(i, j)]).re)
    }
}

/// Cayley-transformed parametrization `T = e^{iK}` with `T† = T`, `Tᵀ = T⁻¹`.
#[derive(Debug, Clone)]
pub struct TMatrix {
    n: usize,
    data: CMat,
}

impl TMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.data
    }

    /// Eigenvalues ascending; all strictly positive for mixed states.
    pub fn eigenvalues(&self) -> DVector<f64> {
        hermitian_eig(&self.data).values
    }
}

/// `C = tanh(iK/2)` for `K = iG`: the correlation matrix of the Gaussian
/// state with exponent `G`.
pub fn correlation_from_g(g: &GMatrix) -> Result<CorrelationMatrix> {
    // iK/2 = -G/2 is Hermitian.
    let half = g.matrix().scale(-0.5);
    let c = hermitian_eig(&half).apply(f64::tanh);
    CorrelationMatrix::new(c)
}

/// Inverts `C = tanh(iK/2)`: `G = -2 atanh(C)`.
///
/// Requires a strictly mixed full-rank state; eigenvalues within
/// [`tol::PURE_GUARD`] of `±1` make the exponent divergent.
pub fn g_from_correlation(c: &CorrelationMatrix) -> Result<GMatrix> {
    let eig = c.eig();
    for &v in eig.values.iter() {
        if v.abs() >= 1.0 - tol::PURE_GUARD {
            return Err(Error::PureDirection {
                value: v.abs(),
                tol: tol::PURE_GUARD,
            });
        }
    }
    let g = eig.apply(|v| -2.0 * v.atanh());
    GMatrix::new(g)
}

/// `T = (1 + C)(1 - C)^{-1}`, evaluated in the eigenbasis of `C`.
pub fn t_from_correlation(c: &CorrelationMatrix) -> Result<TMatrix> {
    let eig = c.eig();
    for &v in eig.values.iter() {
        if v.abs() >= 1.0 - tol::PURE_GUARD {
            return Err(Error::PureDirection {
                value: v.abs(),
                tol: tol::PURE_GUARD,
            });
        }
    }
    let t = eig.apply(|v| (1.0 + v) / (1.0 - v));
    Ok(TMatrix { n: c.n(), data: t })
}

/// Purity `Tr[rho^2] = sqrt(det((1 + C^2)/2))`, accumulated in log space.
pub fn purity(c: &CorrelationMatrix) -> f64 {
    let log_det: f64 = c
        .eigenvalues()
        .iter()
        .map(|&v| ((1.0 + v * v) / 2.0).ln())
        .sum();
    (0.5 * log_det).exp()
}

/// `<sigma_i^z>` in the state with correlations `C` (0-based site index).
pub fn sz_expectation(c: &CorrelationMatrix, i: usize) -> Result<f64> {
    let n = c.n();
    if i >= n {
        return Err(Error::Domain(format!("site {i} out of range for n = {n}")));
    }
    // sigma_i^z = i w_i w_{n+i}
    Ok((C64::i() * c.matrix()[(i, n + i)]).re)
}

/// `<sigma_i^z sigma_j^z>` via the Wick expansion of the four-point function
/// `-<w_i w_{n+i} w_j w_{n+j}>` (0-based sites). The overall sign is pinned
/// by the dense oracle at small `n`.
pub fn zz_correlator(c: &CorrelationMatrix, i: usize, j: usize) -> Result<f64> {
    let n = c.n();
    if i >= n || j >= n {
        return Err(Error::Domain(format!(
            "sites ({i}, {j}) out of range for n = {n}"
        )));
    }
    if i == j {
        return Ok(1.0);
    }
    let m = c.matrix();
    // sigma_i^z sigma_j^z = -w_i w_{n+i} w_j w_{n+j}; Wick-contract the
    // distinct-index four-point function over pairings.
    let val = -(m[(i, n + i)] * m[(j, n + j)] - m[(i, j)] * m[(n + i, n + j)]
        + m[(i, n + j)] * m[(n + i, j)]);
    Ok(val.re)
}
