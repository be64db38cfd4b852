//! End-to-end tests of the `ness` binary: output formats, determinism,
//! overrides, and the exit-code table.

use std::path::Path;
use std::process::{Command, Output};

fn ness() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ness"))
}

fn write_cfg(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    ness().args(args).output().unwrap()
}

const XY_GAP: &str = "model=xy_boundary\ntask=gap\nn=20\nh=0.5\ngamma=0.5\n\
gl_plus=0.3\ngl_minus=0.5\ngr_plus=0.1\ngr_minus=0.5\n";

#[test]
fn gap_task_emits_valid_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "gap.cfg", XY_GAP);
    let out = run(&["gap", "--config", cfg.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["schema_version"], 1);
    assert_eq!(parsed["config"]["task"], "gap");
    let delta = parsed["payload"]["delta"].as_f64().unwrap();
    assert!(delta > 0.0);
    assert_eq!(
        parsed["payload"]["spectrum_re"].as_array().unwrap().len(),
        40
    );
}

#[test]
fn identical_config_and_seed_give_byte_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "oracle.cfg",
        "model=xy_boundary\ntask=oracle-check\nn=2\nseed=11\n",
    );
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    for out in [&out_a, &out_b] {
        let r = run(&[
            "oracle-check",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "outputs differ between identical runs");
}

#[test]
fn phase_diagram_csv_has_documented_header_and_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "phase.cfg",
        "model=xy_boundary\ntask=phase-diagram\nn=8\n\
         h_min=0.2\nh_max=0.8\nh_steps=3\ngamma_min=0.4\ngamma_max=0.8\ngamma_steps=2\n\
         gl_plus=0.3\ngl_minus=0.5\ngr_plus=0.1\ngr_minus=0.5\n",
    );
    let out = run(&["phase-diagram", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "h,gamma,n,g_max,g_hh,g_gg,g_hg,delta,purity,status"
    );
    assert_eq!(lines.count(), 6, "3 x 2 grid rows");
}

#[test]
fn param_overrides_replace_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "gap.cfg", XY_GAP);
    let base = run(&["gap", "--config", cfg.to_str().unwrap()]);
    let overridden = run(&["gap", "--config", cfg.to_str().unwrap(), "--param", "h=1.2"]);
    let a: serde_json::Value = serde_json::from_slice(&base.stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&overridden.stdout).unwrap();
    assert_eq!(b["config"]["h"], "1.2");
    assert_ne!(
        a["payload"]["delta"].as_f64(),
        b["payload"]["delta"].as_f64()
    );
}

#[test]
fn exit_codes_follow_the_documented_table() {
    let dir = tempfile::tempdir().unwrap();
    // 2: config errors (missing keys, bad values, task mismatch).
    let empty = write_cfg(dir.path(), "empty.cfg", "");
    let out = run(&["gap", "--config", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing required key: model"));

    let bad_n = write_cfg(dir.path(), "bad.cfg", &XY_GAP.replace("n=20", "n=-3"));
    let out = run(&["gap", "--config", bad_n.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let cfg = write_cfg(dir.path(), "gap.cfg", XY_GAP);
    let out = run(&["metric", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "task mismatch is a config error"
    );

    // 3: non-unique steady state (all rates zero).
    let undriven = write_cfg(
        dir.path(),
        "undriven.cfg",
        "model=xy_boundary\ntask=steady-state\nn=4\nh=0.1\ngamma=0.1\n\
         gl_plus=0\ngl_minus=0\ngr_plus=0\ngr_minus=0\n",
    );
    let out = run(&["steady-state", "--config", undriven.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    // 4: numerical domain errors (gapless analytic ring on the XX segment).
    let singular = write_cfg(
        dir.path(),
        "singular.cfg",
        "model=ring_analytic\ntask=metric\nn=4\nh=0.0\ngamma=0.0\nmu=1.0\nnu=0.5\n",
    );
    let out = run(&["metric", "--config", singular.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("singular-momentum"));

    // 5: size caps (dense oracle machinery beyond its mode cap).
    let big = write_cfg(
        dir.path(),
        "big.cfg",
        "model=xy_boundary\ntask=oracle-check\nn=4\nh=0.5\ngamma=0.5\n\
         gl_plus=0.3\ngl_minus=0.5\ngr_plus=0.1\ngr_minus=0.5\n",
    );
    let out = run(&["oracle-check", "--config", big.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn output_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "phase.cfg",
        "model=xy_boundary\ntask=phase-diagram\nn=10\n\
         h_min=0.1\nh_max=1.1\nh_steps=4\ngamma_min=0.3\ngamma_max=0.7\ngamma_steps=3\n\
         gl_plus=0.3\ngl_minus=0.5\ngr_plus=0.1\ngr_minus=0.5\n",
    );
    let serial = ness()
        .args([
            "phase-diagram",
            "--config",
            cfg.to_str().unwrap(),
            "--workers",
            "1",
        ])
        .output()
        .unwrap();
    let parallel = ness()
        .args(["phase-diagram", "--config", cfg.to_str().unwrap()])
        .env("NESS_WORKERS", "4")
        .output()
        .unwrap();
    assert!(serial.status.success() && parallel.status.success());
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn steady_state_csv_round_trips_the_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "steady.cfg",
        "model=xy_boundary\ntask=steady-state\nn=2\nh=0.5\ngamma=0.5\n\
         gl_plus=0.3\ngl_minus=0.5\ngr_plus=0.1\ngr_minus=0.5\nformat=csv\n",
    );
    let out = run(&["steady-state", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "i,j,re,im");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 16, "4x4 matrix entries");
    // Entries are parseable 17-significant-digit reals.
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 4);
        fields[2].parse::<f64>().unwrap();
        fields[3].parse::<f64>().unwrap();
    }
}

#[test]
fn scaling_task_reports_fits_and_classification() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "scaling.cfg",
        "model=xy_boundary\ntask=scaling\nn_list=8,12,16,20\nh=1.5\ngamma=0.6\n\
         gl_plus=0.3\ngl_minus=0.5\ngr_plus=0.1\ngr_minus=0.5\n",
    );
    let out = run(&["scaling", "--config", cfg.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["payload"]["points"].as_array().unwrap().len(), 4);
    assert!(parsed["payload"]["g_max_fit"]["exponent"].is_number());
    assert_eq!(parsed["payload"]["classification"]["row"], "Short-range");
}

#[test]
fn ring_analytic_scaling_runs_without_solver() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "ring.cfg",
        "model=ring_analytic\ntask=scaling\nn_list=64,128,256,512\nh=1.0\ngamma=0.5\n\
         mu=1.0\nnu=0.5\n",
    );
    let out = run(&["scaling", "--config", cfg.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let exp = parsed["payload"]["g_hh_fit"]["exponent"].as_f64().unwrap();
    assert!((exp - 2.0).abs() < 0.2, "ring exponent {exp}");
}
