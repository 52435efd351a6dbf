//! Orchestration: run the selected suites, write one report per suite and a
//! summary, and map the outcome to an exit status.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::RunConfig;
use crate::report::{emit_report, Format, Status};
use crate::suites::{Command, Suite};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

pub const SUMMARY_FILE: &str = "summary.txt";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub pass: usize,
    pub fail: usize,
    pub info: usize,
    pub path: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub suites: Vec<SuiteSummary>,
}

impl Outcome {
    pub fn failures(&self) -> usize {
        self.suites.iter().map(|s| s.fail).sum()
    }

    pub fn exit_code(&self) -> u8 {
        if self.failures() == 0 {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

pub struct Options {
    pub out: PathBuf,
    pub format: Format,
    pub quiet: bool,
}

pub fn report_path(out: &Path, suite: Suite, format: Format) -> PathBuf {
    out.join(format!("{}.{}", suite.name(), format.extension()))
}

fn summary_text(cfg: &RunConfig, command: Command, outcome: &Outcome) -> String {
    let mut s = String::new();
    let name = match command {
        Command::All => "all",
        _ => command.suites()[0].name(),
    };
    let _ = writeln!(s, "command = {name}");
    for (k, v) in cfg.echo() {
        let _ = writeln!(s, "{k} = {v}");
    }
    for r in &outcome.suites {
        let _ = writeln!(s, "{}: {} pass, {} fail, {} info", r.suite.name(), r.pass, r.fail, r.info);
    }
    let status = if outcome.failures() == 0 { "pass" } else { "fail" };
    let _ = writeln!(s, "status = {status}");
    s
}

/// Runs the suites of `command` and writes their reports under `opts.out`.
/// Errors only on I/O; check failures are counted in the outcome.
pub fn run(command: Command, cfg: &RunConfig, opts: &Options) -> io::Result<Outcome> {
    fs::create_dir_all(&opts.out)?;
    let probe = opts.out.join(SUMMARY_FILE);
    fs::write(&probe, b"")?;
    let mut outcome = Outcome { suites: Vec::new() };
    for suite in command.suites() {
        let start = Instant::now();
        let panel = suite.run(cfg);
        let path = report_path(&opts.out, suite, opts.format);
        emit_report(&panel.rows, opts.format, &path)?;
        let count = |st: Status| panel.rows.iter().filter(|r| r.status == st).count();
        let summary = SuiteSummary {
            suite,
            pass: count(Status::Pass),
            fail: count(Status::Fail),
            info: count(Status::Info),
            path,
        };
        if !opts.quiet {
            eprintln!(
                "{}: {} pass, {} fail, {} info in {:.1} s",
                suite.name(),
                summary.pass,
                summary.fail,
                summary.info,
                start.elapsed().as_secs_f64()
            );
        }
        outcome.suites.push(summary);
    }
    fs::write(probe, summary_text(cfg, command, &outcome))?;
    Ok(outcome)
}
