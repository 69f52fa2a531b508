use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn freebound(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freebound"))
        .args(args)
        .env("FREEBOUND_OUT_DIR", out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

#[test]
fn passing_checks_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = freebound(
        dir.path(),
        &[
            "verify",
            "--surface",
            "disk",
            "--checks",
            "isoperimetric,boundary-relations",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let reports: Value = serde_json::from_str(&read(dir.path().join("verify-disk2.json"))).unwrap();
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert!(reports
        .iter()
        .all(|r| r["report_version"] == 1 && r["passed"] == true));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout, read(dir.path().join("verify-disk2.txt")));
}

#[test]
fn failing_control_exits_one_and_names_the_residual() {
    let dir = tempfile::tempdir().unwrap();
    let o = freebound(
        dir.path(),
        &[
            "verify",
            "--surface",
            "cap:height=0.5",
            "--checks",
            "isoperimetric",
        ],
    );
    assert_eq!(code(&o), 1);
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert!(stderr.contains("FAIL isoperimetric on cap2"), "{stderr}");
    // Gated checks refuse the non-minimal control rather than passing.
    let o = freebound(dir.path(), &["verify", "--surface", "cap", "--checks", "u2"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8(o.stderr).unwrap().contains("precondition"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["verify", "--surface", "torus"][..],
        &["verify", "--surface", "disk", "--checks", "nope"],
        &["verify", "--surface", "disk", "--killing", "matrix=1,2"],
        &["verify", "--surface", "disk", "--h", "-1"],
        &[
            "verify",
            "--surface",
            "disk",
            "--jobs",
            "0",
            "--checks",
            "isoperimetric",
        ],
        &["solve", "--height", "sin(q)"],
        &["solve", "--init", "obj"],
        &["report"],
        &["frobnicate"],
    ] {
        assert_eq!(code(&freebound(dir.path(), args)), 2, "{args:?}");
    }
}

#[test]
fn report_rejects_schema_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"[{"report_version": 2, "check_name": "x"}]"#).unwrap();
    let o = freebound(dir.path(), &["report", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8(o.stderr).unwrap().contains("report_version 2"));
    std::fs::write(&bad, r#"{"check_name": "x"}"#).unwrap();
    assert_eq!(
        code(&freebound(dir.path(), &["report", bad.to_str().unwrap()])),
        2
    );
    std::fs::write(&bad, "[]").unwrap();
    assert_eq!(
        code(&freebound(dir.path(), &["report", bad.to_str().unwrap()])),
        2
    );
}

#[test]
fn results_are_deterministic_and_only_the_manifest_has_a_timestamp() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "verify",
        "--surface",
        "catenoid",
        "--checks",
        "graph-laplacian,boundary-relations,isoperimetric",
    ];
    assert_eq!(code(&freebound(a.path(), &args)), 0);
    let mut serial = args.to_vec();
    serial.extend(["--jobs", "1"]);
    assert_eq!(code(&freebound(b.path(), &serial)), 0);
    for file in ["verify-catenoid.json", "verify-catenoid.txt"] {
        let text = read(a.path().join(file));
        assert_eq!(text, read(b.path().join(file)), "{file}");
        assert!(!text.contains("timestamp"));
    }
    let manifest: Value =
        serde_json::from_str(&read(a.path().join("verify-catenoid.manifest.json"))).unwrap();
    assert!(manifest["timestamp"].as_str().unwrap().starts_with("20"));
    assert_eq!(manifest["command"], "verify");
    assert_eq!(manifest["exit_code"], 0);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn json_numbers_carry_seventeen_digits() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&freebound(
            dir.path(),
            &["verify", "--surface", "catenoid", "--checks", "isoperimetric"]
        )),
        0
    );
    let text = read(dir.path().join("verify-catenoid.json"));
    let line = text.lines().find(|l| l.contains("\"residual_max\"")).unwrap();
    let mantissa = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let digits = mantissa.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(digits.len(), 17, "{line}");
}

#[test]
fn out_flag_overrides_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = freebound(
        env_dir.path(),
        &[
            "verify",
            "--surface",
            "disk",
            "--checks",
            "isoperimetric",
            "--out",
            flag_dir.path().to_str().unwrap(),
        ],
    );
    assert_eq!(code(&o), 0);
    assert!(flag_dir.path().join("verify-disk2.json").exists());
    assert!(!env_dir.path().join("verify-disk2.json").exists());
}

#[test]
fn solve_writes_mesh_trace_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let o = freebound(
        dir.path(),
        &["solve", "--height", "0.1*(1-r^2)*sin(2*x) + 0.05*y", "--res", "8"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let metrics: Value = serde_json::from_str(&read(dir.path().join("solve.json"))).unwrap();
    assert_eq!(metrics["converged"], true);
    assert!(metrics["plane_deviation"].as_f64().unwrap() < 1e-3);
    assert!(metrics["max_a2"].as_f64().unwrap() < 1e-2);
    let trace = read(dir.path().join("solve.trace.csv"));
    assert_eq!(
        trace.lines().next().unwrap(),
        "iteration,area,max_gradient,boundary_orthogonality"
    );
    let areas: Vec<f64> = trace
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(areas.windows(2).all(|w| w[1] <= w[0]));
    let obj = read(dir.path().join("solve.obj"));
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 6 * 8 * 8);

    // Re-solving the result from its OBJ is already converged.
    let mesh = dir.path().join("solve.obj");
    let o = freebound(
        dir.path(),
        &[
            "solve",
            "--init",
            "obj",
            "--mesh",
            mesh.to_str().unwrap(),
            "--name",
            "again",
        ],
    );
    assert_eq!(code(&o), 0);
    let again: Value = serde_json::from_str(&read(dir.path().join("again.json"))).unwrap();
    assert!(again["iterations"].as_u64().unwrap() <= 1);
}

#[test]
fn solver_failures_still_write_the_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = freebound(
        dir.path(),
        &[
            "solve",
            "--height",
            "0.3*(1-r^2)",
            "--res",
            "8",
            "--max-iter",
            "1",
        ],
    );
    assert_eq!(code(&o), 1);
    let metrics: Value = serde_json::from_str(&read(dir.path().join("solve.json"))).unwrap();
    assert_eq!(metrics["converged"], false);
    assert_eq!(read(dir.path().join("solve.trace.csv")).lines().count(), 3);
    let manifest: Value = serde_json::from_str(&read(dir.path().join("solve.manifest.json"))).unwrap();
    assert_eq!(manifest["exit_code"], 1);
    // A graph that folds over under projection is refused up front.
    assert_eq!(
        code(&freebound(dir.path(), &["solve", "--height", "50", "--res", "8"])),
        2
    );
}

#[test]
fn export_writes_grid_and_triangulation() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&freebound(
            dir.path(),
            &["export", "--surface", "catenoid", "--res", "6"]
        )),
        0
    );
    let csv = read(dir.path().join("export-catenoid.csv"));
    assert_eq!(csv.lines().count(), 1 + 36);
    assert!(read(dir.path().join("export-catenoid.obj"))
        .lines()
        .any(|l| l.starts_with("f ")));
    assert_eq!(
        code(&freebound(
            dir.path(),
            &["export", "--surface", "disk:n=3", "--res", "4"]
        )),
        0
    );
    assert!(!dir.path().join("export-disk3.obj").exists());
}

/// Full battery on the catenoid and the disk, summarized; compared byte for
/// byte against `tests/golden/summary.md`. `UPDATE_GOLDEN=1` rewrites it.
#[test]
fn battery_summary_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&freebound(dir.path(), &["verify", "--surface", "catenoid"])),
        0
    );
    assert_eq!(code(&freebound(dir.path(), &["verify", "--surface", "disk"])), 0);
    let inputs = [
        dir.path().join("verify-catenoid.json"),
        dir.path().join("verify-disk2.json"),
    ];
    let o = freebound(
        dir.path(),
        &["report", inputs[0].to_str().unwrap(), inputs[1].to_str().unwrap()],
    );
    assert_eq!(code(&o), 0);
    let summary = read(dir.path().join("summary.md"));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), summary);
    let csv = read(dir.path().join("summary.csv"));
    assert_eq!(csv.lines().count(), 21);
    assert_eq!(
        csv.lines().next().unwrap(),
        "surface,check,status,residual_max,residual_l2,tolerance,h,points"
    );

    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/summary.md");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(golden.parent().unwrap()).unwrap();
        std::fs::write(&golden, &summary).unwrap();
    }
    assert_eq!(summary, read(&golden));

    // Inputs in the other order give the same summary.
    let o = freebound(
        dir.path(),
        &[
            "report",
            inputs[1].to_str().unwrap(),
            inputs[0].to_str().unwrap(),
            "--name",
            "swapped",
        ],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(read(dir.path().join("swapped.md")), summary);
}
