//! Report rows and their CSV/JSON files.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub suite: String,
    pub check_id: String,
    pub paper_anchor: String,
    pub value: Complex64,
    /// Absent for informational rows.
    pub tolerance: Option<f64>,
    pub status: Status,
}

/// 17 significant digits.
pub fn render_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_number(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|e| format!("bad number {s:?}: {e}"))
}

/// The on-disk shape of a row; every number is text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedRow {
    pub suite: String,
    pub check_id: String,
    pub paper_anchor: String,
    pub value_re: String,
    pub value_im: String,
    pub tolerance: String,
    pub status: Status,
}

impl From<&ReportRow> for RenderedRow {
    fn from(r: &ReportRow) -> Self {
        RenderedRow {
            suite: r.suite.clone(),
            check_id: r.check_id.clone(),
            paper_anchor: r.paper_anchor.clone(),
            value_re: render_number(r.value.re),
            value_im: render_number(r.value.im),
            tolerance: r.tolerance.map(render_number).unwrap_or_default(),
            status: r.status,
        }
    }
}

impl TryFrom<&RenderedRow> for ReportRow {
    type Error = String;

    fn try_from(r: &RenderedRow) -> Result<Self, String> {
        Ok(ReportRow {
            suite: r.suite.clone(),
            check_id: r.check_id.clone(),
            paper_anchor: r.paper_anchor.clone(),
            value: Complex64::new(parse_number(&r.value_re)?, parse_number(&r.value_im)?),
            tolerance: if r.tolerance.is_empty() { None } else { Some(parse_number(&r.tolerance)?) },
            status: r.status,
        })
    }
}

pub fn render(rows: &[ReportRow], format: Format) -> io::Result<Vec<u8>> {
    let rendered: Vec<RenderedRow> = rows.iter().map(RenderedRow::from).collect();
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(["suite", "check_id", "paper_anchor", "value_re", "value_im", "tolerance", "status"])?;
            for r in &rendered {
                w.serialize(r)?;
            }
            w.into_inner().map_err(|e| io::Error::other(e.to_string()))
        }
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&rendered)?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

pub fn parse(bytes: &[u8], format: Format) -> Result<Vec<ReportRow>, String> {
    let rendered: Vec<RenderedRow> = match format {
        Format::Csv => csv::Reader::from_reader(bytes)
            .deserialize()
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?,
        Format::Json => serde_json::from_slice(bytes).map_err(|e| e.to_string())?,
    };
    rendered.iter().map(ReportRow::try_from).collect()
}

pub fn emit_report(rows: &[ReportRow], format: Format, path: &Path) -> io::Result<()> {
    if rows.is_empty() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "no rows to write"));
    }
    fs::write(path, render(rows, format)?)
}

/// Accumulates the rows of one suite.
#[derive(Debug)]
pub struct Panel {
    suite: &'static str,
    pub rows: Vec<ReportRow>,
}

impl Panel {
    pub fn new(suite: &'static str) -> Self {
        Panel { suite, rows: Vec::new() }
    }

    fn push(&mut self, id: &str, anchor: &str, value: Complex64, tolerance: Option<f64>, status: Status) {
        self.rows.push(ReportRow {
            suite: self.suite.to_string(),
            check_id: id.to_string(),
            paper_anchor: anchor.to_string(),
            value,
            tolerance,
            status,
        });
    }

    /// Pass iff `|value| <= tol`.
    pub fn at_most(&mut self, id: &str, anchor: &str, value: impl Into<Complex64>, tol: f64) {
        let v = value.into();
        let ok = v.norm() <= tol;
        self.push(id, anchor, v, Some(tol), if ok { Status::Pass } else { Status::Fail });
    }

    /// Pass iff `value >= bound`.
    pub fn at_least(&mut self, id: &str, anchor: &str, value: f64, bound: f64) {
        let ok = value >= bound;
        self.push(id, anchor, value.into(), Some(bound), if ok { Status::Pass } else { Status::Fail });
    }

    pub fn info(&mut self, id: &str, anchor: &str, value: impl Into<Complex64>) {
        self.push(id, anchor, value.into(), None, Status::Info);
    }

    /// Runs a group of checks; an error becomes a failing row and the
    /// suite carries on.
    pub fn guard<F>(&mut self, id: &str, anchor: &str, body: F)
    where
        F: FnOnce(&mut Panel) -> fockgabor::Result<()>,
    {
        if let Err(e) = body(self) {
            eprintln!("{}/{id}: {e}", self.suite);
            self.push(id, anchor, Complex64::new(f64::NAN, 0.0), None, Status::Fail);
        }
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.status == Status::Fail).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(value: Complex64, tolerance: Option<f64>, status: Status) -> ReportRow {
        ReportRow {
            suite: "verify-fock".into(),
            check_id: "kernel_example".into(),
            paper_anchor: "normalized kernel, weighted".into(),
            value,
            tolerance,
            status,
        }
    }

    #[test]
    fn one_row_csv() {
        let v = -(-std::f64::consts::PI).exp();
        let bytes = render(&[row(Complex64::new(v, 0.0), Some(1e-12), Status::Pass)], Format::Csv).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "suite,check_id,paper_anchor,value_re,value_im,tolerance,status");
        assert_eq!(
            lines[1],
            "verify-fock,kernel_example,\"normalized kernel, weighted\",-4.3213918263772258e-2,0.0000000000000000e0,9.9999999999999998e-13,pass"
        );
    }

    #[test]
    fn round_trip() {
        let rows = vec![
            row(Complex64::new(0.1 + 0.2, -1e-300), Some(1e-6), Status::Pass),
            row(Complex64::new(f64::NAN, 0.0), None, Status::Fail),
            row(Complex64::new(123456.789, 5e-17), None, Status::Info),
        ];
        for format in [Format::Csv, Format::Json] {
            let back = parse(&render(&rows, format).unwrap(), format).unwrap();
            assert_eq!(back.len(), rows.len());
            for (a, b) in rows.iter().zip(&back) {
                assert_eq!(a.suite, b.suite);
                assert_eq!(a.check_id, b.check_id);
                assert_eq!(a.paper_anchor, b.paper_anchor);
                assert_eq!(a.tolerance, b.tolerance);
                assert_eq!(a.status, b.status);
                assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
                assert!(a.value.re.to_bits() == b.value.re.to_bits() || (a.value.re.is_nan() && b.value.re.is_nan()));
            }
        }
        let csv = parse(&render(&rows, Format::Csv).unwrap(), Format::Csv).unwrap();
        let json = parse(&render(&rows, Format::Json).unwrap(), Format::Json).unwrap();
        assert_eq!(format!("{csv:?}"), format!("{json:?}"));
    }

    #[test]
    fn status_rules() {
        let mut p = Panel::new("x");
        p.at_most("a", "", 1e-9, 1e-8);
        p.at_most("b", "", Complex64::new(0.0, 2e-8), 1e-8);
        p.at_least("c", "", 0.5, 0.5);
        p.at_least("d", "", f64::NAN, 0.5);
        p.guard("e", "", |_| Err(fockgabor::Error::Domain("boom".into())));
        let s: Vec<Status> = p.rows.iter().map(|r| r.status).collect();
        assert_eq!(s, vec![Status::Pass, Status::Fail, Status::Pass, Status::Fail, Status::Fail]);
        assert_eq!(p.failures(), 3);
        assert!(emit_report(&[], Format::Csv, Path::new("/nonexistent/x.csv")).is_err());
    }
}
