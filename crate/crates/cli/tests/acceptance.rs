//! Acceptance run: two full `all` runs of the binary, one line per
//! criterion. Criteria in `EXPECTED_FAILURES` are reported honestly but do
//! not fail the target; one of them passing does.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};

use fockgabor_cli::report::{parse, Format, ReportRow, Status};

/// The smallest singular value of the mixed sections shrinks far slower
/// than tenfold between sizes 8 and 16.
const EXPECTED_FAILURES: [&str; 1] = ["AC6"];

const SUITES: [&str; 5] = ["verify-fock", "verify-sigma", "check-identities", "build-counterexample", "gram-defect"];

struct Run {
    rows: BTreeMap<String, Vec<ReportRow>>,
    seconds: BTreeMap<String, f64>,
    files: BTreeMap<String, Vec<u8>>,
    exit: Option<i32>,
}

fn run_all(dir: &Path) -> Run {
    let config = dir.join("run.toml");
    fs::write(&config, "").unwrap();
    let out = dir.join("out");
    let output = Command::new(env!("CARGO_BIN_EXE_fockgabor"))
        .args(["all", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .expect("binary runs");
    let stderr = String::from_utf8_lossy(&output.stderr);
    let mut seconds = BTreeMap::new();
    for line in stderr.lines() {
        if let (Some((suite, _)), Some(rest)) = (line.split_once(':'), line.rsplit_once(" in ")) {
            if let Some(s) = rest.1.strip_suffix(" s").and_then(|s| s.parse::<f64>().ok()) {
                seconds.insert(suite.to_string(), s);
            }
        }
    }
    let mut rows = BTreeMap::new();
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(&out).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let bytes = fs::read(&path).unwrap();
        if let Some(suite) = name.strip_suffix(".csv") {
            rows.insert(suite.to_string(), parse(&bytes, Format::Csv).unwrap());
        }
        files.insert(name, bytes);
    }
    Run { rows, seconds, files, exit: output.status.code() }
}

struct Verdict {
    pass: bool,
    detail: String,
}

/// Every check row of `suite` selected by `keep` passes, within `limit` seconds.
fn suite_checks(run: &Run, suite: &str, limit: f64, keep: impl Fn(&str) -> bool) -> Verdict {
    let Some(rows) = run.rows.get(suite) else {
        return Verdict { pass: false, detail: format!("no report for {suite}") };
    };
    let checks: Vec<&ReportRow> = rows.iter().filter(|r| r.status != Status::Info && keep(&r.check_id)).collect();
    let failed: Vec<&str> = checks.iter().filter(|r| r.status == Status::Fail).map(|r| r.check_id.as_str()).collect();
    let secs = run.seconds.get(suite).copied().unwrap_or(f64::NAN);
    let in_time = secs <= limit;
    let mut detail = format!("{} checks, {} failed, {secs:.1} s of {limit} s", checks.len(), failed.len());
    if !failed.is_empty() {
        detail.push_str(&format!(" [{}]", failed.join(" ")));
    }
    Verdict { pass: !checks.is_empty() && failed.is_empty() && in_time, detail }
}

fn bargmann(id: &str) -> bool {
    id.starts_with("bargmann") || id.starts_with("unitarity")
}

fn defect_rows(id: &str) -> bool {
    id == "mixed.sigma_min_drop" || id == "mixed.sigma_2min_drop" || (id.starts_with("control[") && id.ends_with(".floor"))
}

fn main() -> ExitCode {
    let first_dir = tempfile::tempdir().unwrap();
    let second_dir = tempfile::tempdir().unwrap();
    let first = run_all(first_dir.path());
    let second = run_all(second_dir.path());

    let mut verdicts = vec![
        ("AC1", "reproducing kernels and closed forms", suite_checks(&first, "verify-fock", 120.0, |id| !bargmann(id))),
        ("AC2", "Bargmann transform of Gabor atoms", suite_checks(&first, "verify-fock", 60.0, bargmann)),
        ("AC3", "sigma function", suite_checks(&first, "verify-sigma", 60.0, |_| true)),
        ("AC4", "lattice-series identities", suite_checks(&first, "check-identities", 600.0, |_| true)),
        ("AC5", "counterexample pipeline", suite_checks(&first, "build-counterexample", 600.0, |_| true)),
        ("AC6", "defect scan", suite_checks(&first, "gram-defect", 300.0, defect_rows)),
    ];
    let expected: Vec<String> = SUITES.iter().map(|s| format!("{s}.csv")).chain(["summary.txt".into()]).collect();
    let present = expected.iter().all(|f| first.files.contains_key(f));
    let identical = present && first.files == second.files;
    verdicts.push((
        "AC7",
        "determinism",
        Verdict {
            pass: identical && first.exit == second.exit,
            detail: format!("{} files, identical: {identical}, exit codes {:?}/{:?}", first.files.len(), first.exit, second.exit),
        },
    ));

    let mut unexpected = 0;
    for (id, name, v) in &verdicts {
        let xfail = EXPECTED_FAILURES.contains(id);
        let tag = match (v.pass, xfail) {
            (true, false) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (expected)",
            (true, true) => "PASS (unexpected)",
        };
        if v.pass == xfail {
            unexpected += 1;
        }
        println!("{id} {tag}: {name}: {}", v.detail);
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
