//! Dense linear-algebra helpers on top of nalgebra.
//!
//! The solvers in this crate lean on two factorizations: the Hermitian
//! eigendecomposition (correlation matrices, fidelity) and the complex Schur
//! form of the real structure matrix `X` (gap, Sylvester elimination,
//! eigenvector conditioning). The Schur form is computed once per parameter
//! point and shared by everything downstream.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::{CMat, RMat, C64};

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: DVector<f64>,
    /// Unitary matrix of eigenvectors (columns), same order as `values`.
    pub vectors: CMat,
}

/// Eigendecomposition of the Hermitian part of `a` (the input is projected
/// onto its Hermitian part first, so tiny asymmetries are harmless).
pub fn hermitian_eig(a: &CMat) -> HermitianEig {
    let herm = (a + a.adjoint()).scale(0.5);
    let se = herm.symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    HermitianEig { values, vectors }
}

impl HermitianEig {
    /// Reassembles `U f(Λ) U†` for a scalar function `f` of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMat {
        let d = DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&v| C64::new(f(v), 0.0)),
        );
        &self.vectors * CMat::from_diagonal(&d) * self.vectors.adjoint()
    }
}

/// Complex Schur form `X = Q T Q†` with `Q` unitary and `T` upper triangular.
#[derive(Debug, Clone)]
pub struct ComplexSchur {
    pub q: CMat,
    pub t: CMat,
}

impl ComplexSchur {
    /// Diagonal of `T`: the eigenvalues of `X`.
    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }
}

/// Complex Schur form of a real matrix.
///
/// Computes the real Schur form and then rotates each 2x2 diagonal block to
/// triangular shape with a unitary 2x2 similarity, so the result has scalar
/// diagonal entries (the complex eigenvalues) and exact zeros below.
pub fn complex_schur_of_real(x: &RMat) -> Result<ComplexSchur> {
    let n = x.nrows();
    if x.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "schur input must be square, got {}x{}",
            n,
            x.ncols()
        )));
    }
    let schur = nalgebra::linalg::Schur::try_new(x.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::Convergence("real Schur iteration stalled".into()))?;
    let (q_re, t_re) = schur.unpack();
    let mut q = complexify(&q_re);
    let mut t = complexify(&t_re);

    let scale = t_re.norm().max(1.0);
    let mut k = 0;
    while k < n {
        if k + 1 < n && t[(k + 1, k)].norm() > f64::EPSILON * scale {
            rotate_block_to_triangular(&mut q, &mut t, k);
            k += 2;
        } else {
            if k + 1 < n {
                t[(k + 1, k)] = C64::new(0.0, 0.0);
            }
            k += 1;
        }
    }
    // Sweep away subdiagonal round-off left by the real-Schur iteration.
    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok(ComplexSchur { q, t })
}

/// Rotates the 2x2 block at rows/cols (k, k+1) of `t` to upper triangular
/// form with a unitary similarity, accumulating the rotation into `q`.
fn rotate_block_to_triangular(q: &mut CMat, t: &mut CMat, k: usize) {
    let (a, b) = (t[(k, k)], t[(k, k + 1)]);
    let (c, d) = (t[(k + 1, k)], t[(k + 1, k + 1)]);
    let mean = (a + d) * C64::new(0.5, 0.0);
    let disc = (a - d) * (a - d) * C64::new(0.25, 0.0) + b * c;
    let root = disc.sqrt();
    let lambda = mean + root;
    // Eigenvector of the block for `lambda`; pick the better-conditioned row.
    let v1 = (b, lambda - a);
    let v2 = (lambda - d, c);
    let (u0, u1) = if v1.0.norm() + v1.1.norm() >= v2.0.norm() + v2.1.norm() {
        v1
    } else {
        v2
    };
    let norm = (u0.norm_sqr() + u1.norm_sqr()).sqrt();
    let (u0, u1) = (u0.unscale(norm), u1.unscale(norm));
    // Unitary [u, w] with w orthogonal to u.
    let (w0, w1) = (-u1.conj(), u0.conj());

    let n = t.nrows();
    // T <- G† T (rows k, k+1), then T <- T G (cols k, k+1); Q <- Q G.
    for j in 0..n {
        let (r0, r1) = (t[(k, j)], t[(k + 1, j)]);
        t[(k, j)] = u0.conj() * r0 + u1.conj() * r1;
        t[(k + 1, j)] = w0.conj() * r0 + w1.conj() * r1;
    }
    for i in 0..n {
        let (c0, c1) = (t[(i, k)], t[(i, k + 1)]);
        t[(i, k)] = c0 * u0 + c1 * u1;
        t[(i, k + 1)] = c0 * w0 + c1 * w1;
        let (q0, q1) = (q[(i, k)], q[(i, k + 1)]);
        q[(i, k)] = q0 * u0 + q1 * u1;
        q[(i, k + 1)] = q0 * w0 + q1 * w1;
    }
    t[(k + 1, k)] = C64::new(0.0, 0.0);
    t[(k, k)] = lambda;
    t[(k + 1, k + 1)] = mean - root;
}

/// Right eigenvectors of an upper-triangular matrix, returned as the columns
/// of an upper-triangular matrix (unit 2-norm each). Near-degenerate
/// denominators are floored, which is adequate for conditioning estimates.
pub fn triangular_eigenvectors(t: &CMat) -> CMat {
    let n = t.nrows();
    let floor = f64::EPSILON * t.norm().max(1.0);
    let mut v = CMat::zeros(n, n);
    for k in 0..n {
        v[(k, k)] = C64::new(1.0, 0.0);
        let lambda = t[(k, k)];
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * v[(j, k)];
            }
            let mut den = t[(i, i)] - lambda;
            if den.norm() < floor {
                den = C64::new(floor, 0.0);
            }
            v[(i, k)] = -s / den;
        }
        let norm = v.column(k).norm();
        for i in 0..=k {
            v[(i, k)] = v[(i, k)].unscale(norm);
        }
    }
    v
}

/// Condition number (max/min singular value) of a square complex matrix.
pub fn condition_number(a: &CMat) -> f64 {
    let sv = a.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if smin <= 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Largest singular value.
pub fn op_norm(a: &CMat) -> f64 {
    if a.iter().all(|z| z.norm() == 0.0) {
        return 0.0;
    }
    a.clone().singular_values().max()
}

/// Largest singular value of a real matrix.
pub fn op_norm_real(a: &RMat) -> f64 {
    if a.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    a.clone().singular_values().max()
}

/// Eigenvalues of a general complex matrix via the complex Schur iteration.
pub fn complex_eigenvalues(a: &CMat) -> Result<Vec<C64>> {
    let schur = nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::Convergence("complex Schur iteration stalled".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Lifts a real matrix into the complex field.
pub fn complexify(a: &RMat) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| C64::new(a[(i, j)], 0.0))
}

/// Real part of a complex matrix.
pub fn real_part(a: &CMat) -> RMat {
    RMat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].re)
}

/// Imaginary part of a complex matrix.
pub fn imag_part(a: &CMat) -> RMat {
    RMat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].im)
}

/// Largest |Im| entry, for realness assertions.
pub fn max_imag(a: &CMat) -> f64 {
    a.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// Frobenius norm of `X C + C Xᵀ - Y`.
pub fn sylvester_residual(x: &RMat, c: &CMat, y: &CMat) -> f64 {
    let xc = complexify(x);
    (&xc * c + c * xc.transpose() - y).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_real(n: usize, rng: &mut ChaCha8Rng) -> RMat {
        RMat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn complex_schur_reconstructs_real_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1usize, 2, 5, 12, 30] {
            let x = random_real(n, &mut rng);
            let sf = complex_schur_of_real(&x).unwrap();
            let resid = (&sf.q * &sf.t * sf.q.adjoint() - complexify(&x)).norm();
            assert!(resid < 1e-11 * x.norm().max(1.0), "n={n} resid={resid:e}");
            let unit = (sf.q.adjoint() * &sf.q - CMat::identity(n, n)).norm();
            assert!(unit < 1e-12 * (n as f64), "n={n} unitarity={unit:e}");
            for i in 0..n {
                for j in 0..i {
                    assert_eq!(sf.t[(i, j)], C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn schur_eigenvalues_match_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_real(14, &mut rng);
        let sf = complex_schur_of_real(&x).unwrap();
        let mut mine = sf.eigenvalues();
        let mut theirs: Vec<C64> = x.complex_eigenvalues().iter().copied().collect();
        let key = |z: &C64| (z.re, z.im);
        mine.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        theirs.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        for (a, b) in mine.iter().zip(&theirs) {
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn triangular_eigenvectors_diagonalize() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_real(10, &mut rng);
        let sf = complex_schur_of_real(&x).unwrap();
        let v = triangular_eigenvectors(&sf.t);
        let u = &sf.q * &v;
        let xc = complexify(&x);
        for (k, lambda) in sf.eigenvalues().into_iter().enumerate() {
            let col = u.column(k);
            let resid = (&xc * col - col.scale(1.0) * lambda).norm();
            assert!(resid < 1e-9, "mode {k}: residual {resid:e}");
        }
    }

    #[test]
    fn hermitian_eig_sorted_and_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 9;
        let b = CMat::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let h = (&b + b.adjoint()).scale(0.5);
        let eig = hermitian_eig(&h);
        for i in 1..n {
            assert!(eig.values[i] >= eig.values[i - 1]);
        }
        let rec = eig.apply(|v| v);
        assert!((rec - &h).norm() < 1e-12 * h.norm());
    }
}
