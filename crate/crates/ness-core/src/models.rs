//! Concrete model builders: the boundary-driven XY chain and the
//! translationally invariant dissipative ring.
//!
//! Both models live on the two-dimensional parameter manifold `(h, gamma)`.
//! The Hamiltonian matrices are normalized so that in the weak-dissipation
//! bulk limit the `X`-spectrum approaches `±4i ω_k` with
//! `ω_k = sqrt((cos φ_k - h)^2 + γ^2 sin^2 φ_k)`.
//!
//! Boundary jump operators `σ_1^±` are Majorana-linear as written; `σ_n^±`
//! carries a Jordan-Wigner parity string. Attaching the string replaces it
//! by a plain fermionic operator, which changes the generator only on
//! odd-parity operators and leaves the (even) steady-state sector intact.
//! The dense oracle certifies this at small `n` with the literal spin
//! operators.

use crate::error::{Error, Result};
use crate::lindblad::QuadraticLindbladian;
use crate::metric::MetricTensor;
use crate::{CMat, RMat, C64};

/// Default weak-coupling scale for ring cross-checks.
pub const DEFAULT_RING_EPSILON: f64 = 1e-3;

/// Boundary-driven open XY chain in a transverse field.
#[derive(Debug, Clone, Copy)]
pub struct XYBoundaryConfig {
    pub n: usize,
    pub h: f64,
    pub gamma: f64,
    pub gl_plus: f64,
    pub gl_minus: f64,
    pub gr_plus: f64,
    pub gr_minus: f64,
}

impl XYBoundaryConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Domain(format!(
                "boundary chain needs n >= 2 sites, got {}",
                self.n
            )));
        }
        for (name, rate) in [
            ("gl_plus", self.gl_plus),
            ("gl_minus", self.gl_minus),
            ("gr_plus", self.gr_plus),
            ("gr_minus", self.gr_minus),
        ] {
            if rate < 0.0 || !rate.is_finite() {
                return Err(Error::Domain(format!("rate {name} = {rate} must be >= 0")));
            }
        }
        Ok(())
    }

    /// Quadratic Lindbladian of the chain. A unique steady state further
    /// requires at least one positive rate on each edge; with all rates
    /// zero the solver reports the vanishing gap.
    pub fn build(&self) -> Result<QuadraticLindbladian> {
        self.validate()?;
        let n = self.n;
        let b = xy_hopping_block(n, self.h, self.gamma, false);
        let h = hamiltonian_from_block(&b);
        // sigma_1^± are string-free; sigma_n^± drop their parity string.
        let mut ell = CMat::zeros(4, 2 * n);
        fill_boundary_row(&mut ell, 0, n, 0, self.gl_plus, true);
        fill_boundary_row(&mut ell, 1, n, 0, self.gl_minus, false);
        fill_boundary_row(&mut ell, 2, n, n - 1, self.gr_plus, true);
        fill_boundary_row(&mut ell, 3, n, n - 1, self.gr_minus, false);
        QuadraticLindbladian::new(h, ell)
    }

    /// `∂H/∂h` and `∂H/∂γ` (the jump rows are parameter-independent).
    pub fn hamiltonian_derivatives(&self) -> [CMat; 2] {
        let n = self.n;
        let db_dh = RMat::identity(n, n);
        let mut db_dgamma = RMat::zeros(n, n);
        for j in 0..n - 1 {
            db_dgamma[(j + 1, j)] = -0.5;
            db_dgamma[(j, j + 1)] = 0.5;
        }
        [
            hamiltonian_from_block(&db_dh),
            hamiltonian_from_block(&db_dgamma),
        ]
    }
}

/// `σ^+` (raising, `plus = true`) or `σ^-` at `site`, expressed through the
/// local fermion mode: rows are `sqrt(Γ) (e_site ∓ i e_{n+site}) / 2`.
fn fill_boundary_row(ell: &mut CMat, row: usize, n: usize, site: usize, rate: f64, plus: bool) {
    let amp = rate.sqrt() / 2.0;
    let sign = if plus { -1.0 } else { 1.0 };
    ell[(row, site)] = C64::new(amp, 0.0);
    ell[(row, n + site)] = C64::new(0.0, sign * amp);
}

/// Hopping block `B` of the quadratic form `H = i [[0, B], [-Bᵀ, 0]]`.
///
/// `B = h·1 - (1+γ)/2 S⁻ - (1-γ)/2 S⁺` on the open chain; the ring closes
/// the shifts periodically and flips the sign of the whole block (the
/// fermionic ring Hamiltonian maps onto the spin chain with reversed field).
fn xy_hopping_block(n: usize, h: f64, gamma: f64, periodic: bool) -> RMat {
    let mut b = RMat::identity(n, n).scale(h);
    for j in 0..n - 1 {
        b[(j + 1, j)] = -(1.0 + gamma) / 2.0;
        b[(j, j + 1)] = -(1.0 - gamma) / 2.0;
    }
    if periodic {
        b[(0, n - 1)] = -(1.0 + gamma) / 2.0;
        b[(n - 1, 0)] = -(1.0 - gamma) / 2.0;
        b = b.scale(-1.0);
    }
    b
}

fn hamiltonian_from_block(b: &RMat) -> CMat {
    let n = b.nrows();
    CMat::from_fn(2 * n, 2 * n, |i, j| {
        if i < n && j >= n {
            C64::new(0.0, b[(i, j - n)])
        } else if i >= n && j < n {
            C64::new(0.0, -b[(j, i - n)])
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Translationally invariant XY ring with uniform loss `ε μ f_i` and gain
/// `ε ν f_i†` on every site.
#[derive(Debug, Clone, Copy)]
pub struct RingConfig {
    pub n: usize,
    pub h: f64,
    pub gamma: f64,
    pub mu: f64,
    pub nu: f64,
    pub epsilon: f64,
}

impl RingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Domain(format!(
                "ring needs n >= 2 sites, got {}",
                self.n
            )));
        }
        if self.mu * self.mu + self.nu * self.nu <= 0.0 {
            return Err(Error::Domain(
                "loss/gain amplitudes must not both vanish".into(),
            ));
        }
        Ok(())
    }

    /// Gain/loss imbalance `Λ = (ν² - μ²)/(ν² + μ²)`.
    pub fn lambda(&self) -> f64 {
        let (m2, n2) = (self.mu * self.mu, self.nu * self.nu);
        (n2 - m2) / (n2 + m2)
    }

    /// Quadratic Lindbladian at coupling `ε`.
    pub fn build(&self) -> Result<QuadraticLindbladian> {
        self.validate()?;
        if self.epsilon <= 0.0 {
            return Err(Error::Domain(format!(
                "coupling epsilon = {} must be positive",
                self.epsilon
            )));
        }
        let n = self.n;
        let b = xy_hopping_block(n, self.h, self.gamma, true);
        let h = hamiltonian_from_block(&b);
        // Rows: loss ε μ f_i = ε μ (w_i - i w_{n+i})/2, gain ε ν f_i†.
        let mut ell = CMat::zeros(2 * n, 2 * n);
        for i in 0..n {
            let loss = self.epsilon * self.mu / 2.0;
            ell[(i, i)] = C64::new(loss, 0.0);
            ell[(i, n + i)] = C64::new(0.0, -loss);
            let gain = self.epsilon * self.nu / 2.0;
            ell[(n + i, i)] = C64::new(gain, 0.0);
            ell[(n + i, n + i)] = C64::new(0.0, gain);
        }
        QuadraticLindbladian::new(h, ell)
    }

    /// `∂H/∂h` and `∂H/∂γ` for the ring.
    pub fn hamiltonian_derivatives(&self) -> [CMat; 2] {
        let n = self.n;
        let db_dh = RMat::identity(n, n).scale(-1.0);
        let mut db_dgamma = RMat::zeros(n, n);
        for j in 0..n - 1 {
            db_dgamma[(j + 1, j)] = 0.5;
            db_dgamma[(j, j + 1)] = -0.5;
        }
        db_dgamma[(0, n - 1)] = 0.5;
        db_dgamma[(n - 1, 0)] = -0.5;
        [
            hamiltonian_from_block(&db_dh),
            hamiltonian_from_block(&db_dgamma),
        ]
    }

    /// Momentum grid `φ_k = 2πk/n`, `k = 0..n-1`.
    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n)
            .map(|k| 2.0 * std::f64::consts::PI * k as f64 / self.n as f64)
            .collect()
    }
}

/// XY dispersion `ω(φ) = sqrt((cos φ - h)² + γ² sin² φ)`.
pub fn dispersion(h: f64, gamma: f64, phi: f64) -> f64 {
    let a = phi.cos() - h;
    let b = gamma * phi.sin();
    (a * a + b * b).sqrt()
}

/// Bogoliubov angle `q_k = -2 atan(γ sin φ / (h - cos φ))`, with the
/// removable `0/0` at `sin φ = 0`, `h = cos φ` resolved by continuity in
/// `(h, γ)` (the mode then carries no correlation weight).
pub fn bogoliubov_angle(h: f64, gamma: f64, phi: f64) -> f64 {
    let num = gamma * phi.sin();
    let den = h - phi.cos();
    if den == 0.0 {
        if num == 0.0 {
            // Exactly gapless coincidence: the φ-limit of the angle is ±π
            // and the correlation block carries no weight either way.
            return std::f64::consts::PI;
        }
        return -num.signum() * std::f64::consts::PI;
    }
    -2.0 * (num / den).atan()
}

/// Weak-coupling steady-state correlations of the ring, as 2x2 blocks per
/// momentum (this block matrix is Hermitian but, unlike the site-basis
/// correlation matrix, not transpose-antisymmetric).
#[derive(Debug, Clone)]
pub struct RingCorrelations {
    /// Block-diagonal 2n x 2n matrix, block `k` on rows/cols (2k, 2k+1).
    pub matrix: CMat,
    /// Bogoliubov angles per momentum.
    pub q: Vec<f64>,
}

/// `C = i (Λ/2) ⊕_k [[0, 1 + e^{i q_k}], [-1 - e^{-i q_k}, 0]]` in the
/// momentum-block basis; block eigenvalues `±Λ cos(q_k/2)`.
pub fn ring_analytic_correlations(cfg: &RingConfig) -> Result<RingCorrelations> {
    cfg.validate()?;
    let lambda = cfg.lambda();
    let n = cfg.n;
    let mut matrix = CMat::zeros(2 * n, 2 * n);
    let mut qs = Vec::with_capacity(n);
    for (k, phi) in cfg.momenta().into_iter().enumerate() {
        let q = bogoliubov_angle(cfg.h, cfg.gamma, phi);
        qs.push(q);
        let a = C64::new(1.0 + q.cos(), q.sin());
        let pref = C64::new(0.0, lambda / 2.0);
        matrix[(2 * k, 2 * k + 1)] = pref * a;
        matrix[(2 * k + 1, 2 * k)] = -pref * a.conj();
    }
    Ok(RingCorrelations { matrix, q: qs })
}

/// Momentum-block symbol of a translation-invariant site-basis correlation
/// matrix: for each `φ_k` the 2x2 matrix of `Σ_d C^{ab}(0, d) e^{-i φ_k d}`
/// over the (w, w') grading. Used to compare the numeric ring steady state
/// against [`ring_analytic_correlations`].
pub fn fourier_block_symbol(c_site: &CMat, n: usize) -> CMat {
    let mut blocks = CMat::zeros(2 * n, 2 * n);
    for k in 0..n {
        let phi = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let mut sym = [[C64::new(0.0, 0.0); 2]; 2];
        for d in 0..n {
            let phase = C64::new(0.0, -phi * d as f64).exp();
            sym[0][0] += c_site[(0, d)] * phase;
            sym[0][1] += c_site[(0, n + d)] * phase;
            sym[1][0] += c_site[(n, d)] * phase;
            sym[1][1] += c_site[(n, n + d)] * phase;
        }
        for (i, row) in sym.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                blocks[(2 * k + i, 2 * k + j)] = *v;
            }
        }
    }
    blocks
}

/// Closed-form metric tensor of the ring over the axes `(h, gamma)`:
/// `ds² = (Λ²/2) Σ_k w(q_k) (dq_k)²` with
/// `w(q) = (1 - Λ² cos²(q/2) cos q) / (1 - Λ⁴ cos⁴(q/2))` and
/// `dq_k = 2 sin φ_k (γ dh - (h - cos φ_k) dγ) / ω_k²`.
///
/// Momenta with `sin φ_k = 0` carry `dq_k = 0` identically and contribute
/// nothing, even where the dispersion vanishes; momenta with `ω_k = 0` and
/// `sin φ_k ≠ 0` (the gapless XX segment) are genuinely singular.
pub fn ring_metric_analytic(cfg: &RingConfig) -> Result<MetricTensor> {
    cfg.validate()?;
    let lambda = cfg.lambda();
    if lambda.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "analytic ring metric needs |Λ| < 1, got {lambda}"
        )));
    }
    let mut singular = Vec::new();
    let mut g_hh = 0.0;
    let mut g_hg = 0.0;
    let mut g_gg = 0.0;
    for (k, phi) in cfg.momenta().into_iter().enumerate() {
        // sin φ_k vanishes identically at the exact grid nodes k = 0 and
        // k = n/2, where dq_k = 0 for every (h, γ).
        if k == 0 || 2 * k == cfg.n {
            continue;
        }
        let sin = phi.sin();
        let omega = dispersion(cfg.h, cfg.gamma, phi);
        if omega < crate::tol::GAPLESS_OMEGA {
            singular.push(k);
            continue;
        }
        let q = bogoliubov_angle(cfg.h, cfg.gamma, phi);
        let cos_half = (q / 2.0).cos();
        let c2 = cos_half * cos_half;
        let weight = (1.0 - lambda * lambda * c2 * q.cos()) / (1.0 - lambda.powi(4) * c2 * c2);
        let omega2 = omega * omega;
        let dq_dh = 2.0 * cfg.gamma * sin / omega2;
        let dq_dg = -2.0 * (cfg.h - phi.cos()) * sin / omega2;
        let pref = lambda * lambda / 2.0 * weight;
        g_hh += pref * dq_dh * dq_dh;
        g_hg += pref * dq_dh * dq_dg;
        g_gg += pref * dq_dg * dq_dg;
    }
    if !singular.is_empty() {
        return Err(Error::SingularMomentum { ks: singular });
    }
    MetricTensor::new(
        vec!["h".into(), "gamma".into()],
        RMat::from_row_slice(2, 2, &[g_hh, g_hg, g_hg, g_gg]),
    )
}

/// Phase classification of the boundary-driven chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseLabel {
    /// Short-range magnetic correlations.
    ShortRange,
    /// Long-range magnetic correlations.
    LongRange,
    /// On the critical line `|h| = h_c`.
    CriticalLine,
}

impl PhaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseLabel::ShortRange => "SRMC",
            PhaseLabel::LongRange => "LRMC",
            PhaseLabel::CriticalLine => "critical-line",
        }
    }
}

/// Critical field, localization length, and phase label at `(h, gamma)`.
#[derive(Debug, Clone, Copy)]
pub struct PhaseDiagnostics {
    pub h_c: f64,
    /// Localization length `sqrt(2 h_c / (h - h_c)) / 8`, defined for
    /// `|h| > h_c`.
    pub xi: Option<f64>,
    pub label: PhaseLabel,
}

/// `h_c = |1 - γ²|`; the lines `h = 0` and `γ = 0` are short-range regions
/// embedded in the long-range phase.
pub fn phase_diagnostics(h: f64, gamma: f64) -> PhaseDiagnostics {
    let h_c = (1.0 - gamma * gamma).abs();
    let ah = h.abs();
    let xi = if ah > h_c {
        Some((2.0 * h_c / (ah - h_c)).sqrt() / 8.0)
    } else {
        None
    };
    let label = if (ah - h_c).abs() <= 1e-6 {
        PhaseLabel::CriticalLine
    } else if h == 0.0 || gamma == 0.0 || ah > h_c {
        PhaseLabel::ShortRange
    } else {
        PhaseLabel::LongRange
    };
    PhaseDiagnostics { h_c, xi, label }
}

/// A model family over the `(h, gamma)` manifold, with everything besides
/// those two axes held fixed.
#[derive(Debug, Clone, Copy)]
pub enum ModelFamily {
    XyBoundary {
        gl_plus: f64,
        gl_minus: f64,
        gr_plus: f64,
        gr_minus: f64,
    },
    Ring {
        mu: f64,
        nu: f64,
        epsilon: f64,
    },
}

impl ModelFamily {
    pub fn axis_names(&self) -> [&'static str; 2] {
        ["h", "gamma"]
    }

    pub fn lindbladian(&self, n: usize, h: f64, gamma: f64) -> Result<QuadraticLindbladian> {
        match *self {
            ModelFamily::XyBoundary {
                gl_plus,
                gl_minus,
                gr_plus,
                gr_minus,
            } => XYBoundaryConfig {
                n,
                h,
                gamma,
                gl_plus,
                gl_minus,
                gr_plus,
                gr_minus,
            }
            .build(),
            ModelFamily::Ring { mu, nu, epsilon } => RingConfig {
                n,
                h,
                gamma,
                mu,
                nu,
                epsilon,
            }
            .build(),
        }
    }

    /// `(∂X, ∂Y)` per axis; the jump rows of both families are independent
    /// of `(h, gamma)`, so `∂Y = 0` and `∂X = 4 Re(i ∂H)`.
    pub fn structure_derivatives(&self, n: usize, h: f64, gamma: f64) -> Result<Vec<(RMat, CMat)>> {
        let dhs = match *self {
            ModelFamily::XyBoundary {
                gl_plus,
                gl_minus,
                gr_plus,
                gr_minus,
            } => XYBoundaryConfig {
                n,
                h,
                gamma,
                gl_plus,
                gl_minus,
                gr_plus,
                gr_minus,
            }
            .hamiltonian_derivatives(),
            ModelFamily::Ring { mu, nu, epsilon } => RingConfig {
                n,
                h,
                gamma,
                mu,
                nu,
                epsilon,
            }
            .hamiltonian_derivatives(),
        };
        Ok(dhs
            .into_iter()
            .map(|dh| {
                let dx = crate::linalg::real_part(&dh.map(|z| C64::i() * z).scale(4.0));
                (dx, CMat::zeros(2 * n, 2 * n))
            })
            .collect())
    }
}
