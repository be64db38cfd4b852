//! Brute-force dense ground truth for tiny systems.
//!
//! Everything here works on explicit matrices over the 2^n-dimensional
//! Hilbert space and its 4^n-dimensional operator space (row-major
//! vectorization), with no Gaussian shortcuts. The fast path is validated
//! against these routines at n <= 3; the mode cap is 4.
//!
//! Majorana operators are built through the Jordan-Wigner convention
//! `w_j = (Π_{m<j} σ_m^z) σ_j^x`, `w_{n+j} = -(Π_{m<j} σ_m^z) σ_j^y`,
//! which realizes `σ_j^z = i w_j w_{n+j}`.

use crate::error::{Error, Result};
use crate::gaussian::{CorrelationMatrix, GMatrix};
use crate::linalg::hermitian_eig;
use crate::lindblad::QuadraticLindbladian;
use crate::{tol, CMat, C64};

fn check_mode_cap(n: usize) -> Result<()> {
    if n == 0 || n > tol::ORACLE_MODE_CAP {
        return Err(Error::SizeCap {
            what: "dense oracle",
            n,
            cap: tol::ORACLE_MODE_CAP,
        });
    }
    Ok(())
}

/// 2x2 Pauli matrices.
pub fn pauli(which: char) -> CMat {
    let (a, b, c, d) = match which {
        'x' => (
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ),
        'y' => (
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ),
        'z' => (
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        ),
        '+' => (
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ),
        '-' => (
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ),
        _ => panic!("unknown Pauli label {which}"),
    };
    CMat::from_row_slice(2, 2, &[a, b, c, d])
}

/// Single-site operator `op` at `site` (0-based), identity elsewhere.
pub fn site_operator(n: usize, site: usize, op: &CMat) -> CMat {
    let mut out = CMat::identity(1, 1);
    for j in 0..n {
        let factor = if j == site {
            op.clone()
        } else {
            CMat::identity(2, 2)
        };
        out = out.kronecker(&factor);
    }
    out
}

/// `op` at `site` with a `σ^z` string on all earlier sites.
fn string_operator(n: usize, site: usize, op: &CMat) -> CMat {
    let z = pauli('z');
    let mut out = CMat::identity(1, 1);
    for j in 0..n {
        let factor = if j < site {
            z.clone()
        } else if j == site {
            op.clone()
        } else {
            CMat::identity(2, 2)
        };
        out = out.kronecker(&factor);
    }
    out
}

/// The 2n dense Majorana operators in the crate's index convention.
pub fn dense_majoranas(n: usize) -> Result<Vec<CMat>> {
    check_mode_cap(n)?;
    let mut ws = Vec::with_capacity(2 * n);
    for j in 0..n {
        ws.push(string_operator(n, j, &pauli('x')));
    }
    for j in 0..n {
        ws.push(string_operator(n, j, &pauli('y')).scale(-1.0));
    }
    Ok(ws)
}

/// Parity operator `W = i^n w_1 w_2 ... w_2n`; Hermitian, squares to one,
/// anticommutes with every Majorana.
pub fn parity_operator(n: usize, ws: &[CMat]) -> CMat {
    let dim = 1 << n;
    let mut w = CMat::identity(dim, dim);
    for wj in ws {
        w *= wj;
    }
    let phase = C64::i().powu(n as u32);
    w.map(|z| phase * z)
}

/// Row-major vectorization of a dim x dim operator.
pub fn vectorize(a: &CMat) -> nalgebra::DVector<C64> {
    let d = a.nrows();
    nalgebra::DVector::from_fn(d * d, |k, _| a[(k / d, k % d)])
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &nalgebra::DVector<C64>, dim: usize) -> CMat {
    CMat::from_fn(dim, dim, |i, j| v[i * dim + j])
}

/// Superoperator of `rho -> A rho B` in row-major vectorization.
fn sandwich(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(&b.transpose())
}

/// Dense Liouvillean matrix acting on the vectorized operator space.
#[derive(Debug, Clone)]
pub struct DenseLiouvillean {
    pub n: usize,
    pub matrix: CMat,
}

/// Builds the dense generator from explicit Hamiltonian and jump operators:
/// `rho' = -i[H, rho] + Σ (2 L rho L† - {L†L, rho})`.
pub fn dense_liouvillean_from_ops(n: usize, h: &CMat, jumps: &[CMat]) -> DenseLiouvillean {
    let dim = h.nrows();
    let eye = CMat::identity(dim, dim);
    let mut l = (sandwich(h, &eye) - sandwich(&eye, h)).map(|z| -C64::i() * z);
    for jump in jumps {
        let jd = jump.adjoint();
        let jdj = &jd * jump;
        l += sandwich(jump, &jd).scale(2.0) - sandwich(&jdj, &eye) - sandwich(&eye, &jdj);
    }
    DenseLiouvillean { n, matrix: l }
}

/// Dense generator of a quadratic model: `H = Σ H_ij w_i w_j`,
/// `L_mu = Σ_i l_mu_i w_i`.
pub fn dense_liouvillean(model: &QuadraticLindbladian) -> Result<DenseLiouvillean> {
    let n = model.n();
    check_mode_cap(n)?;
    let ws = dense_majoranas(n)?;
    let dim = 1 << n;
    let mut h = CMat::zeros(dim, dim);
    for i in 0..2 * n {
        for j in 0..2 * n {
            let coeff = model.hamiltonian()[(i, j)];
            if coeff.norm() > 0.0 {
                h += (&ws[i] * &ws[j]).map(|z| coeff * z);
            }
        }
    }
    let mut jumps = Vec::new();
    for mu in 0..model.jump_coefficients().nrows() {
        let mut l = CMat::zeros(dim, dim);
        for (i, w) in ws.iter().enumerate() {
            let coeff = model.jump_coefficients()[(mu, i)];
            if coeff.norm() > 0.0 {
                l += w.map(|z| coeff * z);
            }
        }
        jumps.push(l);
    }
    Ok(dense_liouvillean_from_ops(n, &h, &jumps))
}

/// A dense density matrix.
#[derive(Debug, Clone)]
pub struct DenseState {
    pub rho: CMat,
}

impl DenseState {
    /// Validates Hermiticity, unit trace, and positivity to `1e-10`.
    pub fn new(rho: CMat) -> Result<Self> {
        let herm_dev = (&rho - rho.adjoint()).norm();
        if herm_dev > 1e-10 {
            return Err(Error::StructuralInput(format!(
                "state is not Hermitian: deviation {herm_dev:e}"
            )));
        }
        let trace = rho.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::StructuralInput(format!(
                "state trace {trace} is not 1"
            )));
        }
        let min_eig = hermitian_eig(&rho).values.min();
        if min_eig < -1e-10 {
            return Err(Error::StructuralInput(format!(
                "state has negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { rho })
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    pub fn expectation(&self, op: &CMat) -> C64 {
        (&self.rho * op).trace()
    }
}

/// Extracts the kernel state of the dense generator by singular value
/// decomposition; errors if the kernel is not one-dimensional.
pub fn steady_state_dense(l: &DenseLiouvillean) -> Result<DenseState> {
    let svd = nalgebra::linalg::SVD::new(l.matrix.clone(), false, true);
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let smallest = svd.singular_values[order[0]];
    let second = svd.singular_values[order[1]];
    if second <= 1e-10 {
        return Err(Error::NonUniqueSteadyState { delta: second });
    }
    if smallest > 1e-8 {
        return Err(Error::Convergence(format!(
            "no kernel vector: smallest singular value {smallest:e}"
        )));
    }
    let dim = 1 << l.n;
    let kernel = v_t.row(order[0]).adjoint();
    let raw = unvectorize(&kernel.column(0).into_owned(), dim);
    let herm = (&raw + raw.adjoint()).scale(0.5);
    let trace = herm.trace();
    if trace.norm() < 1e-12 {
        return Err(Error::Convergence("kernel state is traceless".into()));
    }
    let rho = herm.map(|z| z / trace);
    DenseState::new(rho)
}

/// `C_ij = 1/2 Tr(rho [w_i, w_j])` from a dense state.
pub fn correlation_from_dense(state: &DenseState, n: usize) -> Result<CorrelationMatrix> {
    let ws = dense_majoranas(n)?;
    let dim = 2 * n;
    let mut c = CMat::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            if i == j {
                continue;
            }
            let comm = &ws[i] * &ws[j] - &ws[j] * &ws[i];
            c[(i, j)] = (state.rho.clone() * comm).trace() * C64::new(0.5, 0.0);
        }
    }
    CorrelationMatrix::new(c)
}

/// Uhlmann fidelity `Tr sqrt(sqrt(rho) rho' sqrt(rho))` of dense states.
pub fn uhlmann_fidelity_dense(r1: &DenseState, r2: &DenseState) -> f64 {
    let sqrt1 = hermitian_eig(&r1.rho).apply(|v| v.max(0.0).sqrt());
    let inner = &sqrt1 * &r2.rho * &sqrt1;
    hermitian_eig(&inner)
        .values
        .iter()
        .map(|&v| v.max(0.0).sqrt())
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Gaussian state `rho ∝ exp(-(i/4) Σ K_ij w_i w_j)` with `K = iG`.
pub fn density_from_g(g: &GMatrix) -> Result<DenseState> {
    let n = g.n();
    check_mode_cap(n)?;
    let ws = dense_majoranas(n)?;
    let k = g.real_antisymmetric();
    let dim = 1 << n;
    let mut exponent = CMat::zeros(dim, dim);
    for i in 0..2 * n {
        for j in 0..2 * n {
            if k[(i, j)] != 0.0 {
                let coeff = C64::new(0.0, -0.25) * C64::new(k[(i, j)], 0.0);
                exponent += (&ws[i] * &ws[j]).map(|z| coeff * z);
            }
        }
    }
    let rho_raw = hermitian_eig(&exponent).apply(f64::exp);
    let trace = rho_raw.trace();
    DenseState::new(rho_raw.map(|z| z / trace))
}

/// Creation/annihilation superoperators of the generator's quadratic form:
/// `a_j† = -(i/2) W {w_j, ·}`, `a_j = -(i/2) W [w_j, ·]`.
pub fn dense_superoperators(n: usize) -> Result<(Vec<CMat>, Vec<CMat>)> {
    check_mode_cap(n)?;
    let ws = dense_majoranas(n)?;
    let par = parity_operator(n, &ws);
    let dim = 1 << n;
    let eye = CMat::identity(dim, dim);
    let mut creators = Vec::with_capacity(2 * n);
    let mut annihilators = Vec::with_capacity(2 * n);
    for wj in &ws {
        let wwj = &par * wj;
        let left = sandwich(&wwj, &eye);
        let right = sandwich(&par, wj);
        let half_i = C64::new(0.0, -0.5);
        creators.push((&left + &right).map(|z| half_i * z));
        annihilators.push((&left - &right).map(|z| half_i * z));
    }
    Ok((creators, annihilators))
}

/// Report of the superoperator algebra verification.
#[derive(Debug, Clone)]
pub struct CarReport {
    /// Max deviation of `{a_i†, a_j} - δ_ij`, `{a_i, a_j}`, `{a_i†, a_j†}`.
    pub max_car_violation: f64,
    /// Max norm of `a_j` applied to the vectorized identity.
    pub max_vacuum_violation: f64,
}

/// Verifies the canonical anticommutation relations of the superoperators
/// and that the identity operator is their vacuum.
pub fn car_superoperator_check(n: usize) -> Result<CarReport> {
    if n > 3 {
        return Err(Error::SizeCap {
            what: "CAR superoperator check",
            n,
            cap: 3,
        });
    }
    let (creators, annihilators) = dense_superoperators(n)?;
    let dim = 1 << n;
    let sup_dim = dim * dim;
    let eye = CMat::identity(sup_dim, sup_dim);
    let mut worst = 0.0f64;
    let anticomm = |a: &CMat, b: &CMat| a * b + b * a;
    for i in 0..2 * n {
        for j in 0..2 * n {
            let mut dev = anticomm(&creators[i], &annihilators[j]).clone();
            if i == j {
                dev -= &eye;
            }
            worst = worst.max(dev.iter().map(|z| z.norm()).fold(0.0, f64::max));
            let d2 = anticomm(&annihilators[i], &annihilators[j]);
            worst = worst.max(d2.iter().map(|z| z.norm()).fold(0.0, f64::max));
            let d3 = anticomm(&creators[i], &creators[j]);
            worst = worst.max(d3.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    let vac = vectorize(&CMat::identity(dim, dim));
    let mut vac_worst = 0.0f64;
    for a in &annihilators {
        vac_worst = vac_worst.max((a * &vac).norm());
    }
    Ok(CarReport {
        max_car_violation: worst,
        max_vacuum_violation: vac_worst,
    })
}

/// Max deviation of the dense generator from its quadratic form
/// `-Σ X_ij a_i† a_j - (1/2) Σ Y_ij a_i† a_j†`.
pub fn quadratic_form_deviation(model: &QuadraticLindbladian) -> Result<f64> {
    let n = model.n();
    let dense = dense_liouvillean(model)?;
    let s = model.structure()?;
    let (creators, annihilators) = dense_superoperators(n)?;
    let dim = 1 << n;
    let sup_dim = dim * dim;
    let mut quad = CMat::zeros(sup_dim, sup_dim);
    for i in 0..2 * n {
        for j in 0..2 * n {
            let xij = s.x()[(i, j)];
            if xij != 0.0 {
                quad += (&creators[i] * &annihilators[j]).scale(-xij);
            }
            let yij = s.y()[(i, j)];
            if yij.norm() > 0.0 {
                quad += (&creators[i] * &creators[j]).map(|z| C64::new(-0.5, 0.0) * yij * z);
            }
        }
    }
    Ok((quad - &dense.matrix)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// `||<identity| L||`: trace preservation of the dense generator.
pub fn trace_preservation_deviation(l: &DenseLiouvillean) -> f64 {
    let dim = 1 << l.n;
    let left = vectorize(&CMat::identity(dim, dim)).adjoint() * &l.matrix;
    left.norm()
}
