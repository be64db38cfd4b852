//! Steady-state and derivative Sylvester solves.
//!
//! The steady-state correlations solve `X C + C Xᵀ = Y`; the parameter
//! derivatives solve the same equation with right-hand side
//! `∂Y - (∂X) C - C (∂Xᵀ)`. The primary route triangularizes `X` once via
//! its complex Schur form and eliminates; a dense Kronecker-vectorized
//! route `X̂ vec(C) = vec(Y)` serves as an independent cross-check at
//! small sizes. Every returned solution carries a certified residual.

use crate::error::{Error, Result};
use crate::gaussian::CorrelationMatrix;
use crate::linalg::{complexify, sylvester_residual, ComplexSchur};
use crate::lindblad::{delta_from_schur, StructureMatrices};
use crate::{tol, CMat};

/// Which algorithm produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodTag {
    SchurElimination,
    KronVectorized,
}

/// A certified steady-state solution.
#[derive(Debug, Clone)]
pub struct SylvesterSolution {
    pub c: CorrelationMatrix,
    /// Frobenius norm of `X C + C Xᵀ - Y` for the returned (symmetrized) `C`.
    pub residual: f64,
    pub method: MethodTag,
}

/// Parameter derivatives of the steady-state correlations, one matrix per
/// axis, each Hermitian and transpose-antisymmetric.
#[derive(Debug, Clone)]
pub struct DerivativeSet {
    dcs: Vec<CMat>,
}

impl DerivativeSet {
    pub fn new(dcs: Vec<CMat>) -> Result<Self> {
        for dc in &dcs {
            let herm = (dc + dc.adjoint()).scale(0.5);
            let proj = (&herm - herm.transpose()).scale(0.5);
            let dev = (dc - &proj).norm();
            if dev > 1e-9 * (1.0 + dc.norm()) {
                return Err(Error::StructuralInput(format!(
                    "derivative matrix is not imaginary antisymmetric: deviation {dev:e}"
                )));
            }
        }
        Ok(Self { dcs })
    }

    pub fn len(&self) -> usize {
        self.dcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dcs.is_empty()
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.dcs
    }

    /// Directional derivative `Σ_mu step_mu dC_mu`.
    pub fn contract(&self, step: &[f64]) -> Result<CMat> {
        if step.len() != self.dcs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} step components for {} axes",
                step.len(),
                self.dcs.len()
            )));
        }
        let dim = self.dcs[0].nrows();
        let mut out = CMat::zeros(dim, dim);
        for (dc, &s) in self.dcs.iter().zip(step) {
            out += dc.scale(s);
        }
        Ok(out)
    }
}

/// Triangular elimination for `T Z + Z Tᵀ = W` with `T` upper triangular.
fn solve_triangular(t: &CMat, w: &CMat) -> Result<CMat> {
    let n = t.nrows();
    let floor = f64::EPSILON * t.norm();
    let mut z = CMat::zeros(n, n);
    for i in (0..n).rev() {
        for j in (0..n).rev() {
            let mut rhs = w[(i, j)];
            for k in i + 1..n {
                rhs -= t[(i, k)] * z[(k, j)];
            }
            for k in j + 1..n {
                rhs -= z[(i, k)] * t[(j, k)];
            }
            let den = t[(i, i)] + t[(j, j)];
            if den.norm() <= floor {
                return Err(Error::NonUniqueSteadyState { delta: den.norm() });
            }
            z[(i, j)] = rhs / den;
        }
    }
    Ok(z)
}

/// Solves one equation `X C + C Xᵀ = rhs` through a precomputed Schur form,
/// returning the raw (unsymmetrized) solution.
fn solve_via_schur(schur: &ComplexSchur, rhs: &CMat) -> Result<CMat> {
    let q_conj = schur.q.map(|z| z.conj());
    let w = schur.q.adjoint() * rhs * &q_conj;
    let z = solve_triangular(&schur.t, &w)?;
    Ok(&schur.q * z * schur.q.transpose())
}

fn certify(residual: f64, rhs_norm: f64) -> Result<()> {
    let budget = tol::RESIDUAL_TOL * rhs_norm.max(1.0);
    if residual > budget {
        return Err(Error::ResidualTolerance {
            residual,
            tol: budget,
        });
    }
    Ok(())
}

/// Steady-state solve through a shared Schur factorization of `X`.
pub fn solve_steady_with(s: &StructureMatrices, schur: &ComplexSchur) -> Result<SylvesterSolution> {
    let delta = delta_from_schur(schur);
    if delta <= 0.0 {
        return Err(Error::NonUniqueSteadyState { delta });
    }
    let raw = solve_via_schur(schur, s.y())?;
    let c = CorrelationMatrix::new(raw)?;
    let residual = sylvester_residual(s.x(), c.matrix(), s.y());
    certify(residual, s.y().norm())?;
    Ok(SylvesterSolution {
        c,
        residual,
        method: MethodTag::SchurElimination,
    })
}

/// Steady-state correlations of the generator `(X, Y)`.
pub fn solve_steady(s: &StructureMatrices) -> Result<SylvesterSolution> {
    let schur = s.schur()?;
    solve_steady_with(s, &schur)
}

/// Derivative solves `X (∂C) + (∂C) Xᵀ = ∂Y - (∂X) C - C (∂Xᵀ)`, one per
/// axis, reusing the steady-state Schur factorization.
pub fn solve_derivatives_with(
    s: &StructureMatrices,
    schur: &ComplexSchur,
    d_structures: &[(crate::RMat, CMat)],
    c: &CorrelationMatrix,
) -> Result<DerivativeSet> {
    let delta = delta_from_schur(schur);
    if delta <= 0.0 {
        return Err(Error::NonUniqueSteadyState { delta });
    }
    let dim = 2 * s.n();
    let mut dcs = Vec::with_capacity(d_structures.len());
    for (dx, dy) in d_structures {
        if dx.nrows() != dim || dy.nrows() != dim {
            return Err(Error::DimensionMismatch(
                "derivative structure matrices must match 2n".into(),
            ));
        }
        let dxc = complexify(dx);
        let rhs = dy - &dxc * c.matrix() - c.matrix() * dxc.transpose();
        let raw = solve_via_schur(schur, &rhs)?;
        // Exact projection onto the Hermitian transpose-antisymmetric class.
        let herm = (&raw + raw.adjoint()).scale(0.5);
        let dc = (&herm - herm.transpose()).scale(0.5);
        let residual = sylvester_residual(s.x(), &dc, &rhs);
        certify(residual, rhs.norm())?;
        dcs.push(dc);
    }
    DerivativeSet::new(dcs)
}

/// Derivative solves with a fresh factorization of `X`.
pub fn solve_derivatives(
    s: &StructureMatrices,
    d_structures: &[(crate::RMat, CMat)],
    c: &CorrelationMatrix,
) -> Result<DerivativeSet> {
    let schur = s.schur()?;
    solve_derivatives_with(s, &schur, d_structures, c)
}

/// Dense Kronecker route: solves `(X ⊗ 1 + 1 ⊗ X) vec(C) = vec(Y)` with
/// row-major vectorization. Independent of the Schur path; capped at
/// [`tol::VECTORIZED_MODE_CAP`] modes.
pub fn solve_steady_vectorized(s: &StructureMatrices) -> Result<SylvesterSolution> {
    let n = s.n();
    if n > tol::VECTORIZED_MODE_CAP {
        return Err(Error::SizeCap {
            what: "vectorized Sylvester solve",
            n,
            cap: tol::VECTORIZED_MODE_CAP,
        });
    }
    let dim = 2 * n;
    let x = complexify(s.x());
    let eye = CMat::identity(dim, dim);
    let xhat = x.kronecker(&eye) + eye.kronecker(&x);
    let y_vec = nalgebra::DVector::from_fn(dim * dim, |k, _| s.y()[(k / dim, k % dim)]);
    let lu = xhat.lu();
    let c_vec = lu
        .solve(&y_vec)
        .ok_or(Error::NonUniqueSteadyState { delta: 0.0 })?;
    let raw = CMat::from_fn(dim, dim, |i, j| c_vec[i * dim + j]);
    let c = CorrelationMatrix::new(raw)?;
    let residual = sylvester_residual(s.x(), c.matrix(), s.y());
    certify(residual, s.y().norm())?;
    Ok(SylvesterSolution {
        c,
        residual,
        method: MethodTag::KronVectorized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::lindblad::QuadraticLindbladian;
    use crate::{linalg, RMat, C64};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn structure(x: RMat, y: CMat) -> StructureMatrices {
        StructureMatrices::new(x, y, CMat::zeros(0, 0)).unwrap()
    }

    fn random_imag_antisym(dim: usize, scale: f64, rng: &mut ChaCha8Rng) -> CMat {
        let k = instances::random_real_antisymmetric(dim, scale, rng);
        CMat::from_fn(dim, dim, |i, j| C64::new(0.0, k[(i, j)]))
    }

    #[test]
    fn scaled_identity_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let dim = 6;
        let alpha = 0.8;
        let y = random_imag_antisym(dim, 0.3, &mut rng);
        let s = structure(RMat::identity(dim, dim).scale(alpha), y.clone());
        let sol = solve_steady(&s).unwrap();
        let expected = y.scale(1.0 / (2.0 * alpha));
        assert!((sol.c.matrix() - expected).norm() < 1e-12);
        assert_eq!(sol.method, MethodTag::SchurElimination);
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let x = instances::random_stable_x(8, &mut rng);
        let s = structure(x, CMat::zeros(8, 8));
        let sol = solve_steady(&s).unwrap();
        assert!(sol.c.matrix().norm() < 1e-13);
    }

    #[test]
    fn non_positive_gap_is_rejected() {
        let s = structure(RMat::zeros(4, 4), CMat::zeros(4, 4));
        assert!(matches!(
            solve_steady(&s),
            Err(Error::NonUniqueSteadyState { .. })
        ));
    }

    #[test]
    fn schur_and_vectorized_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for trial in 0..50 {
            let n = rng.random_range(1..=8usize);
            let dim = 2 * n;
            let x = instances::random_stable_x(dim, &mut rng);
            // Keep the solution safely inside the unit spectral ball.
            let delta = 2.0
                * linalg::complex_schur_of_real(&x)
                    .unwrap()
                    .eigenvalues()
                    .iter()
                    .map(|z| z.re)
                    .fold(f64::INFINITY, f64::min);
            let y_raw = random_imag_antisym(dim, 1.0, &mut rng);
            let y = y_raw.scale(0.3 * delta / y_raw.norm().max(1e-12));
            let s = structure(x, y);
            let a = solve_steady(&s).unwrap();
            let b = solve_steady_vectorized(&s).unwrap();
            let diff = (a.c.matrix() - b.c.matrix()).norm();
            assert!(diff < 1e-9, "trial {trial}: methods differ by {diff:e}");
            assert_eq!(b.method, MethodTag::KronVectorized);
        }
    }

    #[test]
    fn vectorized_cap_is_enforced() {
        let dim = 2 * (tol::VECTORIZED_MODE_CAP + 1);
        let s = structure(RMat::identity(dim, dim), CMat::zeros(dim, dim));
        assert!(matches!(
            solve_steady_vectorized(&s),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn xhat_inverse_norm_equals_inverse_gap() {
        // Sp(X̂) = {x_i + x_j}; on diagonalizable instances the smallest
        // modulus matches min_{ij} |x_i + x_j| computed from Sp(X).
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let x = instances::random_stable_x(6, &mut rng);
        let xs = linalg::complex_schur_of_real(&x).unwrap().eigenvalues();
        let mut delta_xhat = f64::INFINITY;
        for xi in &xs {
            for xj in &xs {
                delta_xhat = delta_xhat.min((xi + xj).norm());
            }
        }
        let xc = complexify(&x);
        let eye = CMat::identity(6, 6);
        let xhat = xc.kronecker(&eye) + eye.kronecker(&xc);
        let pair_sums = linalg::complex_eigenvalues(&xhat).unwrap();
        let min_mod = pair_sums
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min);
        assert!(
            (min_mod - delta_xhat).abs() < 1e-9 * delta_xhat,
            "spectral min {min_mod} vs pairwise {delta_xhat}"
        );
    }

    #[test]
    fn derivative_closed_form_for_scaled_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let dim = 6;
        let alpha = 1.3;
        let y = random_imag_antisym(dim, 0.4, &mut rng);
        let s = structure(RMat::identity(dim, dim).scale(alpha), y);
        let schur = s.schur().unwrap();
        let sol = solve_steady_with(&s, &schur).unwrap();

        let dx = RMat::from_fn(dim, dim, |i, j| if i == j { 0.7 } else { 0.0 });
        let dy = random_imag_antisym(dim, 0.2, &mut rng);
        let derivs =
            solve_derivatives_with(&s, &schur, &[(dx.clone(), dy.clone())], &sol.c).unwrap();
        let dxc = complexify(&dx);
        let expected = (dy - &dxc * sol.c.matrix() - sol.c.matrix() * dxc.transpose())
            .scale(1.0 / (2.0 * alpha));
        assert!((&derivs.matrices()[0] - expected).norm() < 1e-12);
    }

    #[test]
    fn zero_derivative_structures_give_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let dim = 8;
        let x = instances::random_stable_x(dim, &mut rng);
        let y = random_imag_antisym(dim, 0.1, &mut rng);
        let s = structure(x, y);
        let schur = s.schur().unwrap();
        let sol = solve_steady_with(&s, &schur).unwrap();
        let derivs = solve_derivatives_with(
            &s,
            &schur,
            &[(RMat::zeros(dim, dim), CMat::zeros(dim, dim))],
            &sol.c,
        )
        .unwrap();
        assert!(derivs.matrices()[0].norm() < 1e-13);
    }

    #[test]
    fn derivatives_match_finite_differences_on_parametrized_model() {
        // H(theta) = H0 + theta * H1 with fixed jump rows; compare the
        // derivative solve against a central difference of the steady solve.
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let n = 4;
        let model0 = instances::random_quadratic_model(n, 3, &mut rng);
        let h1 = random_imag_antisym(2 * n, 0.5, &mut rng);

        let at = |theta: f64| {
            let h = model0.hamiltonian() + h1.scale(theta);
            QuadraticLindbladian::new(h, model0.jump_coefficients().clone())
                .unwrap()
                .structure()
                .unwrap()
        };
        let theta0 = 0.3;
        let s = at(theta0);
        let schur = s.schur().unwrap();
        let sol = solve_steady_with(&s, &schur).unwrap();

        // dX = 4 Re(i dH), dY = 0 (jump rows do not depend on theta).
        let dx = linalg::real_part(&h1.map(|z| C64::i() * z).scale(4.0));
        let derivs =
            solve_derivatives_with(&s, &schur, &[(dx, CMat::zeros(2 * n, 2 * n))], &sol.c).unwrap();

        let step = 1e-5 * theta0.abs();
        let plus = solve_steady(&at(theta0 + step)).unwrap();
        let minus = solve_steady(&at(theta0 - step)).unwrap();
        let fd = (plus.c.matrix() - minus.c.matrix()).scale(1.0 / (2.0 * step));
        let err = (&derivs.matrices()[0] - &fd).norm() / fd.norm().max(1e-12);
        assert!(err < 1e-6, "finite-difference mismatch {err:e}");
    }

    #[test]
    fn residuals_are_certified() {
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        let dim = 10;
        let x = instances::random_stable_x(dim, &mut rng);
        let y_raw = random_imag_antisym(dim, 1.0, &mut rng);
        let y = y_raw.scale(0.05 / y_raw.norm());
        let s = structure(x, y);
        let sol = solve_steady(&s).unwrap();
        assert!(sol.residual <= tol::RESIDUAL_TOL * s.y().norm().max(1.0));
        assert!(sol.c.spectral_norm() <= 1.0 + 1e-8);
    }
}
