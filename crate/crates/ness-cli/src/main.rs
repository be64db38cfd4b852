//! `ness` — steady states, information geometry, and spectral gaps of
//! quadratic fermionic Lindblad dynamics from the command line.
//!
//! ```text
//! ness <task> --config <path> [--out <path>] [--format csv|json]
//!      [--workers K] [--seed S] [--param key=value]...
//! ```
//!
//! Exit codes: 0 success, 2 configuration error, 3 non-unique steady state,
//! 4 numerical-tolerance failure, 5 size cap exceeded.

mod config;
mod output;
mod tasks;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use config::{parse_config, OutputFormat, RunConfig, Task};
use ness_core::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "ness",
    version = concat!(env!("CARGO_PKG_VERSION"), " (schema 1)"),
    about = "Steady states, fidelity metric, and gaps of quadratic fermionic Lindblad models"
)]
struct Cli {
    /// Task to run (must match the `task` key in the config).
    #[arg(value_enum)]
    task: Task,

    /// Path to the key=value configuration file.
    #[arg(long)]
    config: std::path::PathBuf,

    /// Output path (overrides the config's `out`).
    #[arg(long)]
    out: Option<std::path::PathBuf>,

    /// Output format (overrides the config's `format`).
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,

    /// Worker threads; 0 uses all available cores. Overrides `NESS_WORKERS`
    /// and the config.
    #[arg(long)]
    workers: Option<usize>,

    /// Seed for randomized checks (overrides the config's `seed`).
    #[arg(long)]
    seed: Option<u64>,

    /// Config overrides, e.g. `--param h=0.5` (repeatable; applied after
    /// the file).
    #[arg(long = "param")]
    params: Vec<String>,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NON_UNIQUE: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;
const EXIT_SIZE_CAP: u8 = 5;

/// Exhaustive mapping of the library error taxonomy onto exit codes.
fn exit_code_for(err: &CoreError) -> u8 {
    match err {
        CoreError::NonUniqueSteadyState { .. } => EXIT_NON_UNIQUE,
        CoreError::SizeCap { .. } => EXIT_SIZE_CAP,
        CoreError::StructuralInput(_)
        | CoreError::DimensionMismatch(_)
        | CoreError::PureDirection { .. }
        | CoreError::ResidualTolerance { .. }
        | CoreError::UnstableSpectrum { .. }
        | CoreError::SingularMomentum { .. }
        | CoreError::Domain(_)
        | CoreError::Convergence(_) => EXIT_NUMERICAL,
    }
}

fn fail(code: u8, kind: &str, message: &str) -> ExitCode {
    // Machine-readable error record on stderr.
    let err = serde_json::json!({
        "error": { "kind": kind, "message": message, "exit_code": code }
    });
    eprintln!("{err}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            return fail(
                EXIT_CONFIG,
                "config",
                &format!("cannot read {}: {e}", cli.config.display()),
            )
        }
    };
    let mut cfg: RunConfig = match parse_config(&text, &cli.params) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, "config", &e.to_string()),
    };
    if cfg.task != cli.task {
        return fail(
            EXIT_CONFIG,
            "config",
            &format!(
                "config task `{}` does not match subcommand `{}`",
                cfg.task.as_str(),
                cli.task.as_str()
            ),
        );
    }
    if let Some(out) = cli.out {
        cfg.out = Some(out.display().to_string());
    }
    if let Some(fmt) = cli.format.as_deref() {
        cfg.format = if fmt == "csv" {
            OutputFormat::Csv
        } else {
            OutputFormat::Json
        };
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let workers = cli
        .workers
        .or_else(|| {
            std::env::var("NESS_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(cfg.workers);
    cfg.workers = workers;
    if let Err(e) = ness_core::par::configure_workers(workers) {
        // Pool reuse across in-process runs is harmless; report and proceed.
        eprintln!("worker-pool note: {e}");
    }

    let t0 = Instant::now();
    let record = match tasks::run(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(exit_code_for(&e), error_kind(&e), &e.to_string()),
    };
    let rendered = match cfg.format {
        OutputFormat::Json => match output::to_json(&record) {
            Ok(s) => s,
            Err(e) => return fail(EXIT_NUMERICAL, "serialization", &e.to_string()),
        },
        OutputFormat::Csv => tasks::to_csv(&record),
    };
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered.as_bytes()) {
                return fail(EXIT_NUMERICAL, "io", &format!("cannot write {path}: {e}"));
            }
        }
        None => print!("{rendered}"),
    }
    eprintln!(
        "{} [wall {:.3}s]{}",
        tasks::summary(&record),
        t0.elapsed().as_secs_f64(),
        cfg.out
            .as_deref()
            .map(|p| format!(" -> {p}"))
            .unwrap_or_default()
    );
    if tasks::failed_oracle_check(&record) {
        return ExitCode::from(EXIT_NUMERICAL);
    }
    ExitCode::SUCCESS
}

fn error_kind(err: &CoreError) -> &'static str {
    match err {
        CoreError::StructuralInput(_) => "structural-input",
        CoreError::DimensionMismatch(_) => "dimension-mismatch",
        CoreError::PureDirection { .. } => "pure-direction",
        CoreError::NonUniqueSteadyState { .. } => "non-unique-steady-state",
        CoreError::ResidualTolerance { .. } => "residual-tolerance",
        CoreError::SizeCap { .. } => "size-cap",
        CoreError::UnstableSpectrum { .. } => "unstable-spectrum",
        CoreError::SingularMomentum { .. } => "singular-momentum",
        CoreError::Domain(_) => "domain",
        CoreError::Convergence(_) => "convergence",
    }
}
