//! Fidelity line element and metric tensor on the manifold of Gaussian
//! steady states.
//!
//! In the eigenbasis of the correlation matrix the rescaled Bures metric is
//!
//! ```text
//! ds² = Σ'_{rs} |dC_rs|² / (1 - c_r c_s),
//! ```
//!
//! the primed sum skipping pairs with `|1 - c_r c_s|` below the
//! pseudo-inverse cut. Pulling back along parameter derivatives gives the
//! tensor `g_{μν}`. The exact Uhlmann fidelity of two mixed Gaussian states
//! is evaluated in the `T = (1+C)(1-C)⁻¹` parametrization with log-domain
//! determinants, and the Cauchy-Schwarz and gap bounds tie `ds²` to the
//! spectral gap.

use crate::error::{Error, Result};
use crate::gaussian::{t_from_correlation, CorrelationMatrix};
use crate::linalg::{hermitian_eig, op_norm, op_norm_real};
use crate::sylvester::DerivativeSet;
use crate::{tol, CMat, RMat};

/// Real symmetric metric tensor over named parameter axes.
#[derive(Debug, Clone)]
pub struct MetricTensor {
    params: Vec<String>,
    g: RMat,
}

impl MetricTensor {
    /// Validates symmetry (to 1e-9 relative) and positive semidefiniteness
    /// up to noise, then stores the symmetrized tensor.
    pub fn new(params: Vec<String>, g: RMat) -> Result<Self> {
        let p = params.len();
        if g.nrows() != p || g.ncols() != p {
            return Err(Error::DimensionMismatch(format!(
                "{p} axes but {}x{} tensor",
                g.nrows(),
                g.ncols()
            )));
        }
        let scale = g.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
        let asym = (&g - g.transpose()).norm();
        if asym > 1e-9 * scale {
            return Err(Error::StructuralInput(format!(
                "metric tensor asymmetry {asym:e}"
            )));
        }
        let sym = (&g + g.transpose()).scale(0.5);
        let min_eig = sym.clone().symmetric_eigen().eigenvalues.min();
        if min_eig < -1e-8 * scale {
            return Err(Error::StructuralInput(format!(
                "metric tensor has negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { params, g: sym })
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn matrix(&self) -> &RMat {
        &self.g
    }

    /// Largest eigenvalue `|g|`, the headline scalar of the sweeps.
    pub fn max_eigenvalue(&self) -> f64 {
        self.g.clone().symmetric_eigen().eigenvalues.max()
    }

    /// Entry by axis name.
    pub fn entry(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.params.iter().position(|p| p == a)?;
        let j = self.params.iter().position(|p| p == b)?;
        Some(self.g[(i, j)])
    }
}

/// `ds² = Σ' |dC_rs|² / (1 - c_r c_s)` for one tangent matrix.
pub fn line_element(c: &CorrelationMatrix, dc: &CMat) -> Result<f64> {
    let dim = 2 * c.n();
    if dc.nrows() != dim || dc.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "dC is {}x{}, expected {dim}x{dim}",
            dc.nrows(),
            dc.ncols()
        )));
    }
    let eig = c.eig();
    let tilted = eig.vectors.adjoint() * dc * &eig.vectors;
    let mut ds2 = 0.0;
    for r in 0..dim {
        for s in 0..dim {
            let den = 1.0 - eig.values[r] * eig.values[s];
            if den.abs() < tol::METRIC_SKIP {
                continue;
            }
            ds2 += tilted[(r, s)].norm_sqr() / den;
        }
    }
    Ok(ds2)
}

/// Pull-back tensor `g_{μν} = Σ' (dC_μ)_{rs} (dC_ν)_{sr} / (1 - c_r c_s)`
/// over the named axes; the imaginary residue must stay below 1e-9.
pub fn metric_tensor(
    c: &CorrelationMatrix,
    derivs: &DerivativeSet,
    params: Vec<String>,
) -> Result<MetricTensor> {
    if params.len() != derivs.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} axis names for {} derivative matrices",
            params.len(),
            derivs.len()
        )));
    }
    let dim = 2 * c.n();
    let eig = c.eig();
    let tilted: Vec<CMat> = derivs
        .matrices()
        .iter()
        .map(|dc| eig.vectors.adjoint() * dc * &eig.vectors)
        .collect();
    let p = tilted.len();
    let mut g = RMat::zeros(p, p);
    let mut max_imag: f64 = 0.0;
    for mu in 0..p {
        for nu in mu..p {
            let mut acc = crate::C64::new(0.0, 0.0);
            for r in 0..dim {
                for s in 0..dim {
                    let den = 1.0 - eig.values[r] * eig.values[s];
                    if den.abs() < tol::METRIC_SKIP {
                        continue;
                    }
                    acc += tilted[mu][(r, s)] * tilted[nu][(s, r)] / crate::C64::new(den, 0.0);
                }
            }
            max_imag = max_imag.max(acc.im.abs());
            g[(mu, nu)] = acc.re;
            g[(nu, mu)] = acc.re;
        }
    }
    let scale = g.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    if max_imag > 1e-9 * scale {
        return Err(Error::StructuralInput(format!(
            "metric tensor imaginary residue {max_imag:e}; a derivative matrix is broken"
        )));
    }
    MetricTensor::new(params, g)
}

/// Exact Uhlmann fidelity of two mixed Gaussian states,
/// `F = det[1 + sqrt(sqrt(T) T' sqrt(T))]^{1/2} /
///      (det[1 + T]^{1/4} det[1 + T']^{1/4})`,
/// accumulated in log space to avoid determinant overflow.
pub fn gaussian_fidelity(c1: &CorrelationMatrix, c2: &CorrelationMatrix) -> Result<f64> {
    if c1.n() != c2.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {} modes",
            c1.n(),
            c2.n()
        )));
    }
    let t1 = t_from_correlation(c1)?;
    let t2 = t_from_correlation(c2)?;
    let eig1 = hermitian_eig(t1.matrix());
    let sqrt_t1 = eig1.apply(|v| v.max(0.0).sqrt());
    let inner = &sqrt_t1 * t2.matrix() * &sqrt_t1;
    let cross = hermitian_eig(&inner);

    let mut log_f = 0.0;
    for &s in cross.values.iter() {
        debug_assert!(s > -1e-9, "cross matrix eigenvalue {s} strongly negative");
        log_f += 0.5 * s.max(0.0).sqrt().ln_1p();
    }
    for &t in eig1.values.iter() {
        log_f -= 0.25 * t.max(0.0).ln_1p();
    }
    for &t in hermitian_eig(t2.matrix()).values.iter() {
        log_f -= 0.25 * t.max(0.0).ln_1p();
    }
    Ok(log_f.exp().clamp(0.0, 1.0))
}

/// Evaluation of the two upper bounds on the line element.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub ds2: f64,
    pub ds2_per_n: f64,
    /// `P_C = (1 - ||C||_inf²)^{-1}`.
    pub p_c: f64,
    /// Cauchy-Schwarz bound `2n P_C ||dC||_inf²`.
    pub cs_bound: f64,
    /// Gap bound `2 (P_C/Δ²)(||dY||_inf + 2 ||dX||_inf)²`; undefined at Δ = 0.
    pub gap_bound: Option<f64>,
    pub cs_satisfied: bool,
    pub gap_satisfied: Option<bool>,
}

/// Checks `ds² <= 2n P_C ||dC||²_inf` and
/// `ds²/n <= 2 (P_C/Δ²)(||dY||_inf + 2||dX||_inf)²` for one direction.
///
/// `dx`, `dy`, `dc` are the structure and correlation differentials already
/// contracted with a unit parameter step; `delta` is the spectral gap.
pub fn bound_report(
    c: &CorrelationMatrix,
    dc: &CMat,
    dx: &RMat,
    dy: &CMat,
    delta: f64,
) -> Result<BoundReport> {
    let n = c.n() as f64;
    let ds2 = line_element(c, dc)?;
    let ds2_per_n = ds2 / n;
    let norm_c = c.spectral_norm().min(1.0);
    let p_c = 1.0 / (1.0 - norm_c * norm_c);
    let cs_bound = 2.0 * n * p_c * op_norm(dc).powi(2);
    let slack = 1e-9;
    let cs_satisfied = ds2 <= cs_bound + slack * cs_bound.max(1.0);
    let (gap_bound, gap_satisfied) = if delta > 0.0 {
        let bound = 2.0 * p_c / (delta * delta) * (op_norm(dy) + 2.0 * op_norm_real(dx)).powi(2);
        (
            Some(bound),
            Some(ds2_per_n <= bound + slack * bound.max(1.0)),
        )
    } else {
        (None, None)
    };
    Ok(BoundReport {
        ds2,
        ds2_per_n,
        p_c,
        cs_bound,
        gap_bound,
        cs_satisfied,
        gap_satisfied,
    })
}
