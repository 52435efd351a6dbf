use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fockgabor_cli::report::{parse, Format, Status};

fn tool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fockgabor")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn missing_command_is_a_usage_error() {
    let out = tool(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no suite selected"));
}

#[test]
fn unknown_key_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "q = 8\nlevels = 3\nwidth = 2\n");
    let out = tool(&["verify-sigma", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(!dir.path().join("verify-sigma.csv").exists());
}

#[test]
fn invalid_value_is_rejected_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "trunc = 2.0\n");
    let out = tool(&["verify-sigma", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn unwritable_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = tool(&["verify-sigma", "--config", &cfg, "--out", blocker.join("sub").to_str().unwrap(), "--quiet"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sigma_suite_writes_report_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out_dir = dir.path().join("out");
    let args = ["verify-sigma", "--config", &cfg, "--out", out_dir.to_str().unwrap(), "--format", "json", "--quiet"];
    let out = tool(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stderr.is_empty());
    let bytes = fs::read(out_dir.join("verify-sigma.json")).unwrap();
    let rows = parse(&bytes, Format::Json).unwrap();
    for id in ["quasi_period_one", "oddness", "realness", "c_ratio"] {
        let row = rows.iter().find(|r| r.check_id == id).unwrap();
        assert_eq!(row.status, Status::Pass);
    }
    let summary = fs::read_to_string(out_dir.join("summary.txt")).unwrap();
    assert!(summary.contains("q = 8"));
    assert!(summary.contains("section_sizes = [8, 12, 16]"));
    assert!(summary.ends_with("status = pass\n"));

    // Same config, same bytes.
    let again = dir.path().join("again");
    let args = ["verify-sigma", "--config", &cfg, "--out", again.to_str().unwrap(), "--format", "json", "--quiet"];
    assert_eq!(tool(&args).status.code(), Some(0));
    assert_eq!(fs::read(again.join("verify-sigma.json")).unwrap(), bytes);
    assert_eq!(fs::read_to_string(again.join("summary.txt")).unwrap(), summary);
}
