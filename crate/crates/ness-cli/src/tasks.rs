//! Task orchestration: build the model, run the pipeline, assemble the
//! serializable run record.

use std::collections::BTreeMap;

use serde::Serialize;

use ness_core::gaussian::{g_from_correlation, purity, sz_expectation, zz_correlator};
use ness_core::lindblad::gap_from_schur;
use ness_core::metric::gaussian_fidelity;
use ness_core::models::{
    ring_analytic_correlations, ring_metric_analytic, ModelFamily, RingConfig, XYBoundaryConfig,
};
use ness_core::scaling::{
    classify_phase, evaluate_point, ring_analytic_scaling, scaling_analysis, sweep_grid,
    PhasePoint, PointStatus, ScalingFit,
};
use ness_core::sylvester::{solve_steady_with, MethodTag};
use ness_core::{instances, oracle, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{echo_config, ModelKind, RunConfig, Task};
use crate::output::{csv_document, csv_field, fmt_f64};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct RunRecord {
    pub artifact_version: &'static str,
    pub schema_version: u32,
    pub config: BTreeMap<String, String>,
    pub payload: Payload,
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum Payload {
    SteadyState(SteadyStatePayload),
    Metric(MetricPayload),
    Gap(GapPayload),
    Scaling(ScalingPayload),
    AnalyticScaling(AnalyticScalingPayload),
    PhaseDiagram(PhaseDiagramPayload),
    OracleCheck(OracleCheckPayload),
}

#[derive(Serialize)]
pub struct SteadyStatePayload {
    pub n: usize,
    pub method: String,
    pub residual: f64,
    pub delta: Option<f64>,
    pub purity: Option<f64>,
    /// Row-major real and imaginary parts of the 2n x 2n matrix (the
    /// site-basis correlation matrix, or the momentum-block matrix for the
    /// analytic ring together with `q`).
    pub c_re: Vec<f64>,
    pub c_im: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
}

#[derive(Serialize)]
pub struct MetricPayload {
    pub params: Vec<String>,
    pub g_hh: f64,
    pub g_hg: f64,
    pub g_gg: f64,
    pub g_max: f64,
    pub delta: Option<f64>,
    pub purity: Option<f64>,
}

#[derive(Serialize)]
pub struct GapPayload {
    pub delta: f64,
    pub stable: bool,
    pub diagonalizable_hint: bool,
    pub eigenvector_condition: f64,
    pub spectrum_re: Vec<f64>,
    pub spectrum_im: Vec<f64>,
}

#[derive(Serialize)]
pub struct FitPayload {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub quality: String,
}

impl From<&ScalingFit> for FitPayload {
    fn from(fit: &ScalingFit) -> Self {
        FitPayload {
            exponent: fit.exponent,
            intercept: fit.intercept,
            r_squared: fit.r_squared,
            quality: fit.quality.as_str().to_string(),
        }
    }
}

#[derive(Serialize)]
pub struct ScalingPointPayload {
    pub n: usize,
    pub g_max: f64,
    pub g_hh: f64,
    pub g_gg: f64,
    pub g_hg: f64,
    pub delta: f64,
    pub purity: f64,
}

#[derive(Serialize)]
pub struct ScalingPayload {
    pub points: Vec<ScalingPointPayload>,
    pub delta_fit: FitPayload,
    pub g_max_fit: FitPayload,
    pub g_hh_fit: FitPayload,
    pub g_gg_fit: FitPayload,
    pub classification: ClassificationPayload,
}

#[derive(Serialize)]
pub struct ClassificationPayload {
    pub row: String,
    pub agrees: bool,
    pub expected_delta_exponent: f64,
    pub expected_g_exponent: f64,
    pub observed_delta_exponent: f64,
    pub observed_g_exponent: f64,
    pub notes: Vec<String>,
}

#[derive(Serialize)]
pub struct AnalyticScalingPayload {
    pub n_values: Vec<usize>,
    pub g_hh_values: Vec<f64>,
    pub g_gg_values: Vec<f64>,
    pub g_hh_fit: FitPayload,
    pub g_gg_fit: FitPayload,
}

#[derive(Serialize)]
pub struct PhaseRowPayload {
    pub h: f64,
    pub gamma: f64,
    pub n: usize,
    pub g_max: Option<f64>,
    pub g_hh: Option<f64>,
    pub g_gg: Option<f64>,
    pub g_hg: Option<f64>,
    pub delta: Option<f64>,
    pub purity: Option<f64>,
    pub status: String,
}

#[derive(Serialize)]
pub struct PhaseDiagramPayload {
    pub rows: Vec<PhaseRowPayload>,
}

#[derive(Serialize)]
pub struct CheckPayload {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct OracleCheckPayload {
    pub n: usize,
    pub seed: u64,
    pub checks: Vec<CheckPayload>,
    pub max_correlation_deviation: f64,
    pub all_passed: bool,
}

fn family(cfg: &RunConfig) -> ModelFamily {
    match cfg.model {
        ModelKind::XyBoundary => ModelFamily::XyBoundary {
            gl_plus: cfg.gl_plus,
            gl_minus: cfg.gl_minus,
            gr_plus: cfg.gr_plus,
            gr_minus: cfg.gr_minus,
        },
        ModelKind::RingNumeric | ModelKind::RingAnalytic => ModelFamily::Ring {
            mu: cfg.mu,
            nu: cfg.nu,
            epsilon: cfg.epsilon,
        },
    }
}

fn ring_config(cfg: &RunConfig, n: usize) -> RingConfig {
    RingConfig {
        n,
        h: cfg.h,
        gamma: cfg.gamma,
        mu: cfg.mu,
        nu: cfg.nu,
        epsilon: cfg.epsilon,
    }
}

fn flatten(m: &ness_core::CMat) -> (Vec<f64>, Vec<f64>) {
    let rows = m.nrows();
    let cols = m.ncols();
    let mut re = Vec::with_capacity(rows * cols);
    let mut im = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            re.push(m[(i, j)].re);
            im.push(m[(i, j)].im);
        }
    }
    (re, im)
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Runs the configured task and returns the serializable record.
pub fn run(cfg: &RunConfig) -> Result<RunRecord> {
    let payload = match cfg.task {
        Task::SteadyState => Payload::SteadyState(run_steady_state(cfg)?),
        Task::Metric => Payload::Metric(run_metric(cfg)?),
        Task::Gap => Payload::Gap(run_gap(cfg)?),
        Task::Scaling => {
            if cfg.model == ModelKind::RingAnalytic {
                Payload::AnalyticScaling(run_analytic_scaling(cfg)?)
            } else {
                Payload::Scaling(run_scaling(cfg)?)
            }
        }
        Task::PhaseDiagram => Payload::PhaseDiagram(run_phase_diagram(cfg)?),
        Task::OracleCheck => Payload::OracleCheck(run_oracle_check(cfg)?),
    };
    Ok(RunRecord {
        artifact_version: env!("CARGO_PKG_VERSION"),
        schema_version: SCHEMA_VERSION,
        config: echo_config(cfg).into_iter().collect(),
        payload,
    })
}

fn run_steady_state(cfg: &RunConfig) -> Result<SteadyStatePayload> {
    if cfg.model == ModelKind::RingAnalytic {
        let ring = ring_analytic_correlations(&ring_config(cfg, cfg.n))?;
        let (c_re, c_im) = flatten(&ring.matrix);
        return Ok(SteadyStatePayload {
            n: cfg.n,
            method: "fourier_analytic".into(),
            residual: 0.0,
            delta: None,
            purity: None,
            c_re,
            c_im,
            q: Some(ring.q),
        });
    }
    let model = family(cfg).lindbladian(cfg.n, cfg.h, cfg.gamma)?;
    let s = model.structure()?;
    let schur = s.schur()?;
    let report = gap_from_schur(&schur);
    let sol = solve_steady_with(&s, &schur)?;
    let (c_re, c_im) = flatten(sol.c.matrix());
    Ok(SteadyStatePayload {
        n: cfg.n,
        method: match sol.method {
            MethodTag::SchurElimination => "schur_elimination".into(),
            MethodTag::KronVectorized => "kron_vectorized".into(),
        },
        residual: sol.residual,
        delta: Some(report.delta),
        purity: Some(purity(&sol.c)),
        c_re,
        c_im,
        q: None,
    })
}

fn run_metric(cfg: &RunConfig) -> Result<MetricPayload> {
    if cfg.model == ModelKind::RingAnalytic {
        let g = ring_metric_analytic(&ring_config(cfg, cfg.n))?;
        return Ok(MetricPayload {
            params: g.params().to_vec(),
            g_hh: g.entry("h", "h").unwrap(),
            g_hg: g.entry("h", "gamma").unwrap(),
            g_gg: g.entry("gamma", "gamma").unwrap(),
            g_max: g.max_eigenvalue(),
            delta: None,
            purity: None,
        });
    }
    let point = evaluate_point(&family(cfg), cfg.n, cfg.h, cfg.gamma)?;
    Ok(MetricPayload {
        params: vec!["h".into(), "gamma".into()],
        g_hh: point.g_hh,
        g_hg: point.g_hg,
        g_gg: point.g_gg,
        g_max: point.g_max,
        delta: Some(point.delta),
        purity: Some(point.purity),
    })
}

fn run_gap(cfg: &RunConfig) -> Result<GapPayload> {
    let model = family(cfg).lindbladian(cfg.n, cfg.h, cfg.gamma)?;
    let report = ness_core::lindblad::gap(&model.structure()?)?;
    Ok(GapPayload {
        delta: report.delta,
        stable: report.stable,
        diagonalizable_hint: report.diagonalizable_hint,
        eigenvector_condition: report.eigenvector_condition,
        spectrum_re: report.x_spectrum.iter().map(|z| z.re).collect(),
        spectrum_im: report.x_spectrum.iter().map(|z| z.im).collect(),
    })
}

fn run_scaling(cfg: &RunConfig) -> Result<ScalingPayload> {
    let analysis = scaling_analysis(&family(cfg), &cfg.n_list, cfg.h, cfg.gamma)?;
    let diag = ness_core::models::phase_diagnostics(cfg.h, cfg.gamma);
    let report = classify_phase(&analysis, &diag, cfg.h, cfg.gamma);
    Ok(ScalingPayload {
        points: analysis
            .points
            .iter()
            .map(|p| ScalingPointPayload {
                n: p.n,
                g_max: p.g_max,
                g_hh: p.g_hh,
                g_gg: p.g_gg,
                g_hg: p.g_hg,
                delta: p.delta,
                purity: p.purity,
            })
            .collect(),
        delta_fit: (&analysis.delta_fit).into(),
        g_max_fit: (&analysis.g_max_fit).into(),
        g_hh_fit: (&analysis.g_hh_fit).into(),
        g_gg_fit: (&analysis.g_gg_fit).into(),
        classification: ClassificationPayload {
            row: report.row.as_str().to_string(),
            agrees: report.agrees,
            expected_delta_exponent: report.expected_delta_exponent,
            expected_g_exponent: report.expected_g_exponent,
            observed_delta_exponent: report.observed_delta_exponent,
            observed_g_exponent: report.observed_g_exponent,
            notes: report.notes,
        },
    })
}

fn run_analytic_scaling(cfg: &RunConfig) -> Result<AnalyticScalingPayload> {
    let (h, gamma, mu, nu, epsilon) = (cfg.h, cfg.gamma, cfg.mu, cfg.nu, cfg.epsilon);
    let cfg_at = move |n: usize| RingConfig {
        n,
        h,
        gamma,
        mu,
        nu,
        epsilon,
    };
    let (g_hh_fit, g_gg_fit) = ring_analytic_scaling(cfg_at, &cfg.n_list)?;
    Ok(AnalyticScalingPayload {
        n_values: cfg.n_list.clone(),
        g_hh_values: g_hh_fit.values.clone(),
        g_gg_values: g_gg_fit.values.clone(),
        g_hh_fit: (&g_hh_fit).into(),
        g_gg_fit: (&g_gg_fit).into(),
    })
}

fn run_phase_diagram(cfg: &RunConfig) -> Result<PhaseDiagramPayload> {
    let grid_axis = |min: f64, max: f64, steps: usize| -> Vec<f64> {
        (0..steps)
            .map(|i| min + (max - min) * i as f64 / (steps - 1) as f64)
            .collect()
    };
    let hs = grid_axis(cfg.h_min, cfg.h_max, cfg.h_steps);
    let gs = grid_axis(cfg.gamma_min, cfg.gamma_max, cfg.gamma_steps);
    let rows = sweep_grid(&family(cfg), cfg.n, &hs, &gs);
    Ok(PhaseDiagramPayload {
        rows: rows.iter().map(phase_row).collect(),
    })
}

fn phase_row(p: &PhasePoint) -> PhaseRowPayload {
    PhaseRowPayload {
        h: p.h,
        gamma: p.gamma,
        n: p.n,
        g_max: finite(p.g_max),
        g_hh: finite(p.g_hh),
        g_gg: finite(p.g_gg),
        g_hg: finite(p.g_hg),
        delta: finite(p.delta),
        purity: finite(p.purity),
        status: match &p.status {
            PointStatus::Ok => "ok".into(),
            PointStatus::Failed(msg) => format!("failed: {msg}"),
        },
    }
}

fn run_oracle_check(cfg: &RunConfig) -> Result<OracleCheckPayload> {
    let n = cfg.n;
    // Reference rates when none are configured.
    let rates_given =
        cfg.gl_plus > 0.0 || cfg.gl_minus > 0.0 || cfg.gr_plus > 0.0 || cfg.gr_minus > 0.0;
    let (glp, glm, grp, grm) = if rates_given {
        (cfg.gl_plus, cfg.gl_minus, cfg.gr_plus, cfg.gr_minus)
    } else {
        (0.3, 0.5, 0.1, 0.5)
    };
    let (h, gamma) = if cfg.h == 0.0 && cfg.gamma == 0.0 {
        (0.5, 0.5)
    } else {
        (cfg.h, cfg.gamma)
    };
    let xy = XYBoundaryConfig {
        n,
        h,
        gamma,
        gl_plus: glp,
        gl_minus: glm,
        gr_plus: grp,
        gr_minus: grm,
    };
    let mut checks = Vec::new();
    let push = |name: &str, deviation: f64, tolerance: f64, checks: &mut Vec<CheckPayload>| {
        checks.push(CheckPayload {
            name: name.to_string(),
            deviation,
            tolerance,
            pass: deviation <= tolerance,
        });
    };

    let model = xy.build()?;
    let s = model.structure()?;
    let sol = ness_core::sylvester::solve_steady(&s)?;
    let dense = oracle::dense_liouvillean(&model)?;
    let steady = oracle::steady_state_dense(&dense)?;
    let c_dense = oracle::correlation_from_dense(&steady, n)?;
    let c_dev = (sol.c.matrix() - c_dense.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    push("steady_state_correlations", c_dev, 1e-8, &mut checks);

    let mut obs_dev = (purity(&sol.c) - steady.purity()).abs();
    for i in 0..n {
        let sz = oracle::site_operator(n, i, &oracle::pauli('z'));
        obs_dev = obs_dev.max((sz_expectation(&sol.c, i)? - steady.expectation(&sz).re).abs());
        for j in 0..n {
            let zz = &sz * oracle::site_operator(n, j, &oracle::pauli('z'));
            obs_dev =
                obs_dev.max((zz_correlator(&sol.c, i, j)? - steady.expectation(&zz).re).abs());
        }
    }
    push("spin_observables", obs_dev, 1e-8, &mut checks);

    let car = oracle::car_superoperator_check(n)?;
    push(
        "car_anticommutators",
        car.max_car_violation,
        1e-10,
        &mut checks,
    );
    push("a_vacuum", car.max_vacuum_violation, 1e-10, &mut checks);
    push(
        "quadratic_form_identity",
        oracle::quadratic_form_deviation(&model)?,
        1e-10,
        &mut checks,
    );
    push(
        "trace_preservation",
        oracle::trace_preservation_deviation(&dense),
        1e-10,
        &mut checks,
    );

    let quad_spec = ness_core::lindblad::liouvillean_spectrum(&s, 2 * n)?;
    let dense_eigs = ness_core::linalg::complex_eigenvalues(&dense.matrix)?;
    let spec_dev = quad_spec
        .iter()
        .map(|z| {
            dense_eigs
                .iter()
                .map(|w| (w - z).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    push("generator_spectrum", spec_dev, 1e-7, &mut checks);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut random_dev = 0.0f64;
    let mut tested = 0;
    while tested < 3 {
        let model = instances::random_quadratic_model(2, 3, &mut rng);
        let s = model.structure()?;
        let report = ness_core::lindblad::gap(&s)?;
        if report.delta <= 1e-6 {
            continue;
        }
        let sol = ness_core::sylvester::solve_steady(&s)?;
        let dense = oracle::dense_liouvillean(&model)?;
        let steady = oracle::steady_state_dense(&dense)?;
        let c_dense = oracle::correlation_from_dense(&steady, 2)?;
        random_dev = random_dev.max(
            (sol.c.matrix() - c_dense.matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
        );
        tested += 1;
    }
    push("random_model_steady_states", random_dev, 1e-8, &mut checks);

    let mut fid_dev = 0.0f64;
    for _ in 0..3 {
        let c1 = instances::random_correlation(2, 0.7, &mut rng);
        let c2 = instances::random_correlation(2, 0.75, &mut rng);
        let r1 = oracle::density_from_g(&g_from_correlation(&c1)?)?;
        let r2 = oracle::density_from_g(&g_from_correlation(&c2)?)?;
        fid_dev = fid_dev
            .max((oracle::uhlmann_fidelity_dense(&r1, &r2) - gaussian_fidelity(&c1, &c2)?).abs());
    }
    push("gaussian_fidelity", fid_dev, 1e-8, &mut checks);

    let all_passed = checks.iter().all(|c| c.pass);
    let payload = OracleCheckPayload {
        n,
        seed: cfg.seed,
        checks,
        max_correlation_deviation: c_dev,
        all_passed,
    };
    if !all_passed {
        // Caller maps this to the numerical-tolerance exit code after the
        // report has been written.
        return Ok(payload);
    }
    Ok(payload)
}

/// CSV rendering of a record's payload.
pub fn to_csv(record: &RunRecord) -> String {
    match &record.payload {
        Payload::SteadyState(p) => {
            let dim = (p.c_re.len() as f64).sqrt() as usize;
            let rows = (0..dim).flat_map(|i| {
                let p_re = &p.c_re;
                let p_im = &p.c_im;
                (0..dim).map(move |j| {
                    format!(
                        "{i},{j},{},{}",
                        fmt_f64(p_re[i * dim + j]),
                        fmt_f64(p_im[i * dim + j])
                    )
                })
            });
            csv_document("i,j,re,im", rows.collect::<Vec<_>>())
        }
        Payload::Metric(p) => csv_document(
            "g_hh,g_hg,g_gg,g_max,delta,purity",
            [format!(
                "{},{},{},{},{},{}",
                fmt_f64(p.g_hh),
                fmt_f64(p.g_hg),
                fmt_f64(p.g_gg),
                fmt_f64(p.g_max),
                p.delta.map(fmt_f64).unwrap_or_default(),
                p.purity.map(fmt_f64).unwrap_or_default()
            )],
        ),
        Payload::Gap(p) => csv_document(
            "re,im",
            p.spectrum_re
                .iter()
                .zip(&p.spectrum_im)
                .map(|(re, im)| format!("{},{}", fmt_f64(*re), fmt_f64(*im)))
                .collect::<Vec<_>>(),
        ),
        Payload::Scaling(p) => csv_document(
            "n,g_max,g_hh,g_gg,g_hg,delta,purity",
            p.points
                .iter()
                .map(|r| {
                    format!(
                        "{},{},{},{},{},{},{}",
                        r.n,
                        fmt_f64(r.g_max),
                        fmt_f64(r.g_hh),
                        fmt_f64(r.g_gg),
                        fmt_f64(r.g_hg),
                        fmt_f64(r.delta),
                        fmt_f64(r.purity)
                    )
                })
                .collect::<Vec<_>>(),
        ),
        Payload::AnalyticScaling(p) => csv_document(
            "n,g_hh,g_gg",
            p.n_values
                .iter()
                .zip(p.g_hh_values.iter().zip(&p.g_gg_values))
                .map(|(n, (hh, gg))| format!("{n},{},{}", fmt_f64(*hh), fmt_f64(*gg)))
                .collect::<Vec<_>>(),
        ),
        Payload::PhaseDiagram(p) => csv_document(
            "h,gamma,n,g_max,g_hh,g_gg,g_hg,delta,purity,status",
            p.rows
                .iter()
                .map(|r| {
                    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_else(|| "NaN".into());
                    format!(
                        "{},{},{},{},{},{},{},{},{},{}",
                        fmt_f64(r.h),
                        fmt_f64(r.gamma),
                        r.n,
                        opt(r.g_max),
                        opt(r.g_hh),
                        opt(r.g_gg),
                        opt(r.g_hg),
                        opt(r.delta),
                        opt(r.purity),
                        csv_field(&r.status)
                    )
                })
                .collect::<Vec<_>>(),
        ),
        Payload::OracleCheck(p) => csv_document(
            "name,deviation,tolerance,pass",
            p.checks
                .iter()
                .map(|c| {
                    format!(
                        "{},{},{},{}",
                        csv_field(&c.name),
                        fmt_f64(c.deviation),
                        fmt_f64(c.tolerance),
                        c.pass
                    )
                })
                .collect::<Vec<_>>(),
        ),
    }
}

/// Whether the record reports a failed oracle check (mapped to the
/// numerical-tolerance exit code).
pub fn failed_oracle_check(record: &RunRecord) -> bool {
    matches!(&record.payload, Payload::OracleCheck(p) if !p.all_passed)
}

/// One-line human summary for stderr.
pub fn summary(record: &RunRecord) -> String {
    match &record.payload {
        Payload::SteadyState(p) => format!(
            "steady-state: n={} residual={:.2e} delta={}",
            p.n,
            p.residual,
            p.delta
                .map(|d| format!("{d:.3e}"))
                .unwrap_or_else(|| "-".into())
        ),
        Payload::Metric(p) => format!("metric: |g|={:.6e} g_hh={:.6e}", p.g_max, p.g_hh),
        Payload::Gap(p) => format!(
            "gap: delta={:.6e} stable={} diagonalizable={}",
            p.delta, p.stable, p.diagonalizable_hint
        ),
        Payload::Scaling(p) => format!(
            "scaling: |g| exponent {:+.3} (r2={:.4}), delta exponent {:+.3}; {} [{}]",
            p.g_max_fit.exponent,
            p.g_max_fit.r_squared,
            p.delta_fit.exponent,
            p.classification.row,
            if p.classification.agrees {
                "agrees"
            } else {
                "disagrees"
            }
        ),
        Payload::AnalyticScaling(p) => format!(
            "scaling (analytic ring): g_hh exponent {:+.3}, g_gg exponent {:+.3}",
            p.g_hh_fit.exponent, p.g_gg_fit.exponent
        ),
        Payload::PhaseDiagram(p) => {
            let failed = p.rows.iter().filter(|r| r.status != "ok").count();
            format!("phase-diagram: {} rows, {} failed", p.rows.len(), failed)
        }
        Payload::OracleCheck(p) => format!(
            "oracle-check: n={} {} checks, max correlation deviation {:.2e}, {}",
            p.n,
            p.checks.len(),
            p.max_correlation_deviation,
            if p.all_passed {
                "all passed"
            } else {
                "FAILURES"
            }
        ),
    }
}
