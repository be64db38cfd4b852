//! Structure matrices and spectral data of quadratic Lindblad generators.
//!
//! For a quadratic Hamiltonian `H = Σ H_ij w_i w_j` and linear jump
//! operators `L_mu = Σ l_mu_i w_i`, the generator is fixed by
//!
//! ```text
//! X = 4 (iH + Re M),   Y = -8i Im M,   M_ij = Σ_mu l_mu_i l*_mu_j,
//! ```
//!
//! with `X` real. Its eigenvalues `x_k` determine the full spectrum of the
//! generator as `-{Σ_j x_j n_j : n_j ∈ {0, 1}}` and the gap
//! `Δ = 2 min_k Re x_k`.

use crate::error::{Error, Result};
use crate::linalg::{
    complex_schur_of_real, complexify, condition_number, hermitian_eig, imag_part, max_imag,
    real_part, triangular_eigenvectors, ComplexSchur,
};
use crate::{tol, CMat, RMat, C64};

/// A quadratic Lindbladian: Hamiltonian matrix plus jump-operator rows.
#[derive(Debug, Clone)]
pub struct QuadraticLindbladian {
    n: usize,
    h: CMat,
    ell: CMat,
}

impl QuadraticLindbladian {
    /// `h` is the 2n x 2n imaginary antisymmetric Hamiltonian matrix,
    /// `ell` the m x 2n matrix of jump coefficients (m may be 0).
    pub fn new(h: CMat, ell: CMat) -> Result<Self> {
        let dim = h.nrows();
        if h.ncols() != dim || dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "H must be 2n x 2n, got {}x{}",
                dim,
                h.ncols()
            )));
        }
        if ell.ncols() != dim && ell.nrows() > 0 {
            return Err(Error::DimensionMismatch(format!(
                "jump rows have {} columns, expected {dim}",
                ell.ncols()
            )));
        }
        let herm = (&h + h.adjoint()).scale(0.5);
        let proj = (&herm - herm.transpose()).scale(0.5);
        let violation = (&h - &proj).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if violation > tol::STRUCTURE_TOL {
            return Err(Error::StructuralInput(format!(
                "H is not an imaginary antisymmetric quadratic form: deviation {violation:e}"
            )));
        }
        Ok(Self {
            n: dim / 2,
            h: proj,
            ell,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.h
    }

    pub fn jump_coefficients(&self) -> &CMat {
        &self.ell
    }

    /// Derives the structure matrices `X`, `Y`, `M`.
    pub fn structure(&self) -> Result<StructureMatrices> {
        build_structure(self)
    }
}

/// The matrices defining the quadratic generator.
#[derive(Debug, Clone)]
pub struct StructureMatrices {
    n: usize,
    x: RMat,
    y: CMat,
    m: CMat,
}

impl StructureMatrices {
    /// Validates realness of `X`, imaginary antisymmetry of `Y`, and
    /// positive semidefiniteness of `M`.
    pub fn new(x: RMat, y: CMat, m: CMat) -> Result<Self> {
        let dim = x.nrows();
        if x.ncols() != dim || y.nrows() != dim || y.ncols() != dim || !dim.is_multiple_of(2) {
            return Err(Error::DimensionMismatch(
                "X and Y must be square 2n x 2n".into(),
            ));
        }
        let y_real = real_part(&y).norm();
        let y_sym = (&y + y.transpose()).norm();
        if y_real > tol::STRUCTURE_TOL * (1.0 + y.norm())
            || y_sym > tol::STRUCTURE_TOL * (1.0 + y.norm())
        {
            return Err(Error::StructuralInput(format!(
                "Y is not imaginary antisymmetric: realness {y_real:e}, symmetry {y_sym:e}"
            )));
        }
        if m.nrows() > 0 {
            let min_eig = hermitian_eig(&m).values.min();
            if min_eig < -tol::STRUCTURE_TOL {
                return Err(Error::StructuralInput(format!(
                    "M has negative eigenvalue {min_eig:e}"
                )));
            }
        }
        Ok(Self {
            n: dim / 2,
            x,
            y,
            m,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> &RMat {
        &self.x
    }

    pub fn y(&self) -> &CMat {
        &self.y
    }

    pub fn m(&self) -> &CMat {
        &self.m
    }

    /// Complex Schur factorization of `X`, shared by the gap report and the
    /// Sylvester solves at the same parameter point.
    pub fn schur(&self) -> Result<ComplexSchur> {
        complex_schur_of_real(&self.x)
    }
}

/// `X = 4(iH + Re M)`, `Y = -8i Im M`, `M = l^T l*`.
pub fn build_structure(model: &QuadraticLindbladian) -> Result<StructureMatrices> {
    let dim = 2 * model.n;
    let m = if model.ell.nrows() == 0 {
        CMat::zeros(dim, dim)
    } else {
        model.ell.transpose() * model.ell.map(|z| z.conj())
    };
    let ih = model.h.map(|z| C64::i() * z);
    let x_complex = (ih + complexify(&real_part(&m))).scale(4.0);
    let imag_resid = max_imag(&x_complex);
    if imag_resid > tol::STRUCTURE_TOL {
        return Err(Error::StructuralInput(format!(
            "X acquired imaginary part {imag_resid:e}; H is not a valid quadratic form"
        )));
    }
    let x = real_part(&x_complex);
    let y_imag = imag_part(&m).scale(-8.0);
    let y = CMat::from_fn(dim, dim, |i, j| C64::new(0.0, y_imag[(i, j)]));
    StructureMatrices::new(x, y, m)
}

/// Spectral report for the generator.
#[derive(Debug, Clone)]
pub struct GapReport {
    /// `Δ = 2 min_k Re x_k`, reported as 0 when marginally stable.
    pub delta: f64,
    /// Eigenvalues of `X` sorted by real part.
    pub x_spectrum: Vec<C64>,
    /// All real parts are above `-STRUCTURE_TOL`.
    pub stable: bool,
    /// Eigenvector-matrix condition number below the diagonalizability cut.
    pub diagonalizable_hint: bool,
    /// Condition number of the eigenvector matrix of `X`.
    pub eigenvector_condition: f64,
}

/// `Δ = 2 min Re x` straight from a Schur form, without the eigenvector
/// conditioning analysis (the cheap path for sweeps).
pub fn delta_from_schur(schur: &ComplexSchur) -> f64 {
    let min_re = (0..schur.t.nrows())
        .map(|i| schur.t[(i, i)].re)
        .fold(f64::INFINITY, f64::min);
    if min_re.abs() < tol::MARGINAL_RE {
        0.0
    } else {
        (2.0 * min_re).max(0.0)
    }
}

/// Gap and stability report from a precomputed Schur form.
pub fn gap_from_schur(schur: &ComplexSchur) -> GapReport {
    let mut spectrum = schur.eigenvalues();
    spectrum.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let min_re = spectrum.first().map(|z| z.re).unwrap_or(0.0);
    let stable = min_re >= -tol::STRUCTURE_TOL;
    let delta = if min_re.abs() < tol::MARGINAL_RE {
        0.0
    } else {
        (2.0 * min_re).max(0.0)
    };
    let u = &schur.q * triangular_eigenvectors(&schur.t);
    let cond = condition_number(&u);
    GapReport {
        delta,
        x_spectrum: spectrum,
        stable,
        diagonalizable_hint: cond <= tol::DIAGONALIZABLE_COND,
        eigenvector_condition: cond,
    }
}

/// Eigenvalues of `X` (no diagonalizability assumed), the gap, and flags.
pub fn gap(s: &StructureMatrices) -> Result<GapReport> {
    Ok(gap_from_schur(&s.schur()?))
}

/// Restricted generator spectrum: `-{Σ_j x_j n_j}` over occupation patterns
/// with at most `max_excitations` occupied modes. Always contains 0.
pub fn liouvillean_spectrum(s: &StructureMatrices, max_excitations: usize) -> Result<Vec<C64>> {
    let report = gap(s)?;
    spectrum_from_modes(&report.x_spectrum, max_excitations)
}

/// Restricted spectrum enumeration from the mode eigenvalues.
pub fn spectrum_from_modes(modes: &[C64], max_excitations: usize) -> Result<Vec<C64>> {
    let dim = modes.len();
    let mut count: usize = 0;
    let mut binom: f64 = 1.0;
    for k in 0..=max_excitations.min(dim) {
        if k > 0 {
            binom *= (dim - k + 1) as f64 / k as f64;
        }
        if binom > tol::SPECTRUM_BUDGET as f64 {
            return Err(Error::SizeCap {
                what: "spectrum enumeration",
                n: binom as usize,
                cap: tol::SPECTRUM_BUDGET,
            });
        }
        count += binom as usize;
        if count > tol::SPECTRUM_BUDGET {
            return Err(Error::SizeCap {
                what: "spectrum enumeration",
                n: count,
                cap: tol::SPECTRUM_BUDGET,
            });
        }
    }
    let mut out = Vec::with_capacity(count);
    let mut stack: Vec<(usize, usize, C64)> = vec![(0, 0, C64::new(0.0, 0.0))];
    while let Some((start, used, sum)) = stack.pop() {
        out.push(-sum);
        if used == max_excitations {
            continue;
        }
        for (j, m) in modes.iter().enumerate().skip(start) {
            stack.push((j + 1, used + 1, sum + m));
        }
    }
    Ok(out)
}

/// The three expressions of the spectral gap that must coincide for a
/// stable diagonalizable generator.
#[derive(Debug, Clone)]
pub struct GapIdentityReport {
    /// `2 min Re x_k`.
    pub delta: f64,
    /// Minimum modulus over nonzero restricted occupation patterns.
    pub delta_liouvillean: f64,
    /// `min_{i,j} |x_i + x_j|`.
    pub delta_xhat: f64,
    pub max_discrepancy: f64,
}

/// Checks the gap identity `Δ = Δ_L = Δ_X̂` for a stable, diagonalizable `X`.
pub fn check_gap_identities(s: &StructureMatrices) -> Result<GapIdentityReport> {
    let report = gap(s)?;
    gap_identities_from_report(&report)
}

/// Gap-identity comparison from a precomputed gap report.
pub fn gap_identities_from_report(report: &GapReport) -> Result<GapIdentityReport> {
    if !report.stable {
        let min_re = report.x_spectrum.first().map(|z| z.re).unwrap_or(0.0);
        return Err(Error::UnstableSpectrum { min_re });
    }
    let delta = report.delta;
    let restricted = spectrum_from_modes(&report.x_spectrum, 2)?;
    let delta_l = restricted
        .iter()
        .map(|z| z.norm())
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let modes = &report.x_spectrum;
    let mut delta_xhat = f64::INFINITY;
    for (i, xi) in modes.iter().enumerate() {
        for xj in modes.iter().skip(i) {
            delta_xhat = delta_xhat.min((xi + xj).norm());
        }
    }
    let max_discrepancy = (delta - delta_l)
        .abs()
        .max((delta - delta_xhat).abs())
        .max((delta_l - delta_xhat).abs());
    Ok(GapIdentityReport {
        delta,
        delta_liouvillean: delta_l,
        delta_xhat,
        max_discrepancy,
    })
}
