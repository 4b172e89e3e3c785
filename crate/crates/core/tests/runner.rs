//! Whole runs through the library entry point and the `simulate` binary.

use std::path::Path;
use std::process::Command;

use lcflow::config::{load_config, SimulationConfig};
use lcflow::diagnostics::{DiagnosticsRecord, LinfMode};
use lcflow::output::read_snapshot;
use lcflow::runner::{run, snapshot_path, HaltReason, TIMESERIES_FILE};
use lcflow::PhysicsParams;

fn config(text: &str) -> SimulationConfig {
    load_config(text).unwrap()
}

#[test]
fn winding_director_accumulates_exact_monitor() {
    let report = run(&config(
        "dim = 2\nres = 16\nscenario = winding_director\nscenario.k = 1\nt_max = 2\ndt = 0.01\n",
    ))
    .unwrap();
    assert_eq!(report.halt_reason, HaltReason::TMaxReached);
    assert_eq!(report.steps, 200);
    assert!((report.final_record.monitor_accum - 2.0).abs() < 1e-8);
    assert_eq!(report.gronwall_c, Some(0.0));
    assert!(report.energy_residual < 1e-10);
}

#[test]
fn decaying_vortex_never_trips_monitor() {
    // The 2D integrand sees only the director, which is constant here.
    let report = run(&config(
        "dim = 2\nres = 16\nscenario = taylor_green\nt_max = 0.2\nmonitor_max = 1e-6\n",
    ))
    .unwrap();
    assert_eq!(report.halt_reason, HaltReason::TMaxReached);
    assert_eq!(report.final_record.monitor_accum, 0.0);
    assert!((report.final_time - 0.2).abs() < 1e-12);
}

#[test]
fn tiny_threshold_stops_random_run_early() {
    let report = run(&config(
        "dim = 2\nres = 16\nscenario = random_smooth\nt_max = 1\ndt = 0.01\nmonitor_max = 1e-12\n",
    ))
    .unwrap();
    assert_eq!(report.halt_reason, HaltReason::MonitorExceeded);
    assert_eq!(report.steps, 1);
    assert!(report.final_record.monitor_accum > 1e-12);
}

#[test]
fn three_dimensional_random_run_completes() {
    let report = run(&config(
        "dim = 3\nres = 8\nscenario = random_smooth\nscenario.seed = 4\nt_max = 0.05\nintegrator = IF-RK2\n",
    ))
    .unwrap();
    assert_eq!(report.halt_reason, HaltReason::TMaxReached);
    assert!(report.final_record.monitor_accum > 0.0);
    assert!(report.gronwall_c.is_some_and(f64::is_finite));
    assert!(report.final_record.sphere_norm_err < 1e-12);
}

#[test]
fn identical_configs_write_identical_files() {
    let text = "dim = 2\nres = 16\nscenario = random_smooth\nscenario.seed = 9\nt_max = 0.1\ndt = 0.01\nrecord_every = 3\nsnapshot_every = 5\n";
    let [a, b] = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in [&a, &b] {
        let mut c = config(text);
        c.output_dir = Some(dir.path().to_path_buf());
        run(&c).unwrap();
    }
    let read = |dir: &Path, name: &str| std::fs::read(dir.join(name)).unwrap();
    let csv = read(a.path(), TIMESERIES_FILE);
    assert_eq!(csv, read(b.path(), TIMESERIES_FILE));
    // steps 0, 3, 6, 9 and the final step 10
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 6);
    for name in [
        "snapshot_000000.elcf",
        "snapshot_000005.elcf",
        "snapshot_000010.elcf",
    ] {
        assert_eq!(read(a.path(), name), read(b.path(), name));
    }
}

#[test]
fn snapshot_reproduces_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(
        "dim = 2\nres = 16\nscenario = random_smooth\nt_max = 0.04\ndt = 0.01\nrecord_every = 1\nsnapshot_every = 4\n",
    );
    c.output_dir = Some(dir.path().to_path_buf());
    let report = run(&c).unwrap();
    let s = read_snapshot(&snapshot_path(dir.path(), 4)).unwrap();
    let mut rec = DiagnosticsRecord::evaluate(&s, &PhysicsParams::default(), LinfMode::Collocation);
    rec.monitor_accum = report.final_record.monitor_accum;
    assert_eq!(rec, report.final_record);
}

fn simulate(args: &[&str], env_dir: Option<&Path>) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_simulate"));
    cmd.args(args).env_remove("SIM_OUTPUT_DIR");
    if let Some(dir) = env_dir {
        cmd.env("SIM_OUTPUT_DIR", dir);
    }
    let out = cmd.output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

#[test]
fn cli_exit_codes_and_output_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "dim = 2\nres = 16\nscenario = taylor_green\nt_max = 0.05\ndt = 0.01\noutput_dir = ignored\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let out_dir = dir.path().join("out");

    let (code, stdout) = simulate(&["run", "--config", cfg], Some(&out_dir));
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("t_max_reached"));
    assert!(out_dir.join(TIMESERIES_FILE).exists());

    let (code, _) = simulate(&["run", "--config", cfg, "--set", "nu=-1"], Some(&out_dir));
    assert_eq!(code, 2);
    let (code, _) = simulate(
        &["run", "--config", cfg, "--set", "colour=red"],
        Some(&out_dir),
    );
    assert_eq!(code, 2);
    let (code, _) = simulate(&["run", "--config", "/nonexistent/run.cfg"], None);
    assert_eq!(code, 2);
    let (code, _) = simulate(
        &[
            "run",
            "--config",
            cfg,
            "--set",
            "scenario=winding_director",
            "--set",
            "scenario.k=6",
        ],
        Some(&out_dir),
    );
    assert_eq!(code, 2, "under-resolved winding is a configuration error");

    let (code, stdout) = simulate(&["verify", "--suite", "spectral"], None);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("0 failed"));
    let (code, _) = simulate(&["verify", "--suite", "bogus"], None);
    assert_eq!(code, 2);
}
