//! Seeded random test instances.
//!
//! Used by the property tests, the acceptance suite, and the CLI
//! `oracle-check` task. Everything is deterministic given the RNG.

use rand::Rng;

use crate::gaussian::{CorrelationMatrix, GMatrix};
use crate::lindblad::QuadraticLindbladian;
use crate::{CMat, RMat, C64};

/// Random real antisymmetric matrix with entries of order `scale`.
pub fn random_real_antisymmetric(dim: usize, scale: f64, rng: &mut impl Rng) -> RMat {
    let raw = RMat::from_fn(dim, dim, |_, _| rng.random_range(-scale..scale));
    (&raw - raw.transpose()).scale(0.5)
}

/// Random correlation matrix with spectral radius exactly `max_norm`.
pub fn random_correlation(n: usize, max_norm: f64, rng: &mut impl Rng) -> CorrelationMatrix {
    let k = random_real_antisymmetric(2 * n, 1.0, rng);
    let radius = crate::linalg::op_norm_real(&k);
    let factor = if radius > 0.0 { max_norm / radius } else { 0.0 };
    CorrelationMatrix::from_real_antisymmetric(&k.scale(factor)).expect("scaled antisymmetric")
}

/// Random Gaussian exponent matrix (imaginary antisymmetric `G`).
pub fn random_g(n: usize, scale: f64, rng: &mut impl Rng) -> GMatrix {
    let k = random_real_antisymmetric(2 * n, scale, rng);
    GMatrix::from_real_antisymmetric(&k).expect("antisymmetric by construction")
}

/// Random stable, diagonalizable real matrix whose spectrum consists of
/// complex-conjugate pairs `a ± ib` with `a > 0` and `|b| >= 2a`.
///
/// In this regime the Liouvillean gap identities hold with equality: the
/// minimum over occupation patterns is attained on a single conjugate pair,
/// never on a lone eigenvalue.
pub fn random_stable_x(dim: usize, rng: &mut impl Rng) -> RMat {
    assert!(dim >= 2 && dim.is_multiple_of(2), "dimension must be even");
    let mut blocks = RMat::zeros(dim, dim);
    for p in 0..dim / 2 {
        let a = rng.random_range(0.1..1.0);
        let b = rng.random_range(2.0 * a..5.0 * a) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        blocks[(2 * p, 2 * p)] = a;
        blocks[(2 * p + 1, 2 * p + 1)] = a;
        blocks[(2 * p, 2 * p + 1)] = b;
        blocks[(2 * p + 1, 2 * p)] = -b;
    }
    // Mild non-orthogonal similarity keeps the matrix diagonalizable but
    // generic (non-normal).
    let perturb = RMat::from_fn(dim, dim, |_, _| rng.random_range(-0.15..0.15));
    let s = RMat::identity(dim, dim) + perturb;
    let s_inv = s
        .clone()
        .try_inverse()
        .expect("similarity transform is near identity");
    &s * blocks * s_inv
}

/// Random quadratic Lindbladian: imaginary antisymmetric `H` plus `m`
/// complex jump-coefficient rows.
pub fn random_quadratic_model(n: usize, m: usize, rng: &mut impl Rng) -> QuadraticLindbladian {
    let k = random_real_antisymmetric(2 * n, 1.0, rng);
    let h = CMat::from_fn(2 * n, 2 * n, |i, j| C64::new(0.0, k[(i, j)]));
    let ell = CMat::from_fn(m, 2 * n, |_, _| {
        C64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))
    });
    QuadraticLindbladian::new(h, ell).expect("structurally valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complex_schur_of_real;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn stable_x_spectrum_is_paired_and_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x = random_stable_x(10, &mut rng);
        let eigs = complex_schur_of_real(&x).unwrap().eigenvalues();
        for z in &eigs {
            assert!(z.re > 0.0, "unstable eigenvalue {z}");
            assert!(z.im.abs() >= 2.0 * z.re - 1e-9, "pair regime violated: {z}");
        }
    }

    #[test]
    fn random_correlation_has_requested_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let c = random_correlation(4, 0.9, &mut rng);
        assert!((c.spectral_norm() - 0.9).abs() < 1e-10);
    }
}
