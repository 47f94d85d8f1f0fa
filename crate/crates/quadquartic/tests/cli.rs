//! End-to-end checks of the command-line interface: exit codes, output
//! files, format switches, and quiet mode.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quadquartic"))
}

fn run(args: &[&str], out_dir: &Path) -> Output {
    bin()
        .args(args)
        .arg("--out")
        .arg(out_dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn every_subcommand_succeeds_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("check-solution", "points.csv"),
        ("decompose", "points.csv"),
        ("hyers", "trace.csv"),
        ("certify", "points.csv"),
        ("identities", "points.csv"),
        ("bounds", "points.csv"),
    ];
    for (cmd, table) in cases {
        let out = dir.path().join(cmd);
        let output = run(&[cmd, "--quiet"], &out);
        assert!(
            output.status.success(),
            "{cmd}: status {:?}, stderr: {}",
            output.status.code(),
            String::from_utf8_lossy(&output.stderr)
        );
        let report_path = out.join("report.json");
        assert!(report_path.is_file(), "{cmd}: missing report.json");
        assert!(out.join(table).is_file(), "{cmd}: missing {table}");
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
        assert_eq!(report["command"].as_str().unwrap(), cmd.replace('-', "_"));
        assert_eq!(report["ok"].as_bool(), Some(true), "{cmd}: report not ok");
    }
}

#[test]
fn failed_mathematical_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"function": {"kind": "builtin", "name": "cubic"}}"#,
    );
    let output = run(
        &["check-solution", "--quiet", "--config", config.to_str().unwrap()],
        &dir.path().join("out"),
    );
    assert_eq!(output.status.code(), Some(1));
    // The verdict is still written out for inspection.
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["ok"].as_bool(), Some(false));
}

#[test]
fn divergent_bound_request_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // A constant control never admits the shrink direction.
    let config = write_config(
        dir.path(),
        r#"{
            "control": {"kind": "constant", "theta": 0.5, "fit": false},
            "iteration": {"m_max": 24, "tol": 1e-10, "direction": "shrink"},
            "certify": {"flavor": "quadratic"}
        }"#,
    );
    let output = run(
        &["bounds", "--quiet", "--config", config.to_str().unwrap()],
        &dir.path().join("out"),
    );
    assert_eq!(output.status.code(), Some(1));
    assert!(!output.stderr.is_empty());
}

#[test]
fn missing_config_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(
        &["check-solution", "--quiet", "--config", "/nonexistent/config.json"],
        &dir.path().join("out"),
    );
    assert_eq!(output.status.code(), Some(2));
    assert!(!output.stderr.is_empty());
}

#[test]
fn invalid_config_values_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        r#"{"equation": {"n": 1}}"#,
        r#"{"space": {"dim": 1, "p": 1.5}}"#,
        r#"{"grid": {"min": 2.0, "max": -2.0, "count": 21, "dyadic": true, "denom_pow": 4}}"#,
        r#"not json"#,
    ] {
        let config = write_config(dir.path(), body);
        let output = run(
            &["check-solution", "--quiet", "--config", config.to_str().unwrap()],
            &dir.path().join("out"),
        );
        assert_eq!(
            output.status.code(),
            Some(2),
            "config {body:?}: stderr {}",
            String::from_utf8_lossy(&output.stderr)
        );
    }
}

#[test]
fn quiet_flag_silences_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let quiet = run(&["identities", "--quiet"], &dir.path().join("a"));
    assert!(quiet.status.success());
    assert!(quiet.stdout.is_empty());

    let loud = run(&["identities"], &dir.path().join("b"));
    assert!(loud.status.success());
    let text = String::from_utf8(loud.stdout).unwrap();
    let report: serde_json::Value = serde_json::from_str(&text).expect("stdout is the report");
    assert_eq!(report["command"].as_str(), Some("identities"));
}

#[test]
fn csv_format_streams_the_tables() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(&["check-solution", "--format", "csv"], &dir.path().join("out"));
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.lines().next().unwrap().contains(','), "no csv header: {text}");
    // Every emitted float carries full precision.
    assert!(text.contains('e'), "floats are not in scientific notation");
}

#[test]
fn reports_do_not_depend_on_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("deep/nested/a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let output = run(&["decompose", "--quiet"], out);
        assert!(output.status.success());
    }
    let ra = std::fs::read(a.join("report.json")).unwrap();
    let rb = std::fs::read(b.join("report.json")).unwrap();
    assert_eq!(ra, rb);
}
