//! Deterministic CSV and JSON writers. Bodies carry no timestamps; the only
//! run-dependent values are the `runtime_ms` fields.

use std::fs;
use std::path::{Path, PathBuf};

use fracgreen_core::solver::{CascadeReport, SweepReport};
use fracgreen_core::verify::SuiteReport;
use fracgreen_core::Field;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
#[error("cannot write {path}: {message}")]
pub struct OutputError {
    pub path: PathBuf,
    pub message: String,
}

fn fail(path: &Path, e: impl ToString) -> OutputError {
    OutputError {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Create `dir` and make sure a file can be written inside it.
pub fn prepare_dir(dir: &Path) -> Result<(), OutputError> {
    fs::create_dir_all(dir).map_err(|e| fail(dir, e))?;
    let probe = dir.join(".fracgreen-probe");
    fs::write(&probe, b"").map_err(|e| fail(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| fail(&probe, e))
}

/// Shortest round-trip text; exponent form outside `[1e-4, 1e16)`.
fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, OutputError> {
    csv::Writer::from_path(path).map_err(|e| fail(path, e))
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> Result<(), OutputError> {
    w.flush().map_err(|e| fail(path, e))
}

/// `x1,…,xn,value`, one row per grid point.
pub fn write_field_csv(path: &Path, field: &Field) -> Result<(), OutputError> {
    let mut w = csv_writer(path)?;
    let n = field.grid().dim();
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.push("value".into());
    w.write_record(&header).map_err(|e| fail(path, e))?;
    for (x, v) in field.grid().points().zip(field.values()) {
        let row = x.iter().chain(std::iter::once(v)).map(|&c| num(c));
        w.write_record(row).map_err(|e| fail(path, e))?;
    }
    finish(w, path)
}

/// `lambda,min_w,violations`, one row per λ. Skipped steps leave `min_w` empty.
pub fn write_sweep_csv(path: &Path, report: &SweepReport) -> Result<(), OutputError> {
    let mut w = csv_writer(path)?;
    w.write_record(["lambda", "min_w", "violations"])
        .map_err(|e| fail(path, e))?;
    for ((lam, m), v) in report
        .lambda_values
        .iter()
        .zip(&report.min_w)
        .zip(&report.violation_counts)
    {
        let m = m.map(num).unwrap_or_default();
        w.write_record([num(*lam), m, v.to_string()])
            .map_err(|e| fail(path, e))?;
    }
    finish(w, path)
}

/// `suite,violations,worst_margin,runtime_ms`.
pub fn write_summary_csv(path: &Path, reports: &[SuiteReport]) -> Result<(), OutputError> {
    let mut w = csv_writer(path)?;
    w.write_record(["suite", "violations", "worst_margin", "runtime_ms"])
        .map_err(|e| fail(path, e))?;
    for r in reports {
        w.write_record([
            r.suite.clone(),
            r.violations.to_string(),
            num(r.worst_margin),
            r.runtime_ms.to_string(),
        ])
        .map_err(|e| fail(path, e))?;
    }
    finish(w, path)
}

/// `n,alpha,p,m_min,tau,f,fprime,max_recursion_gap,passes`.
pub fn write_scan_csv(path: &Path, reports: &[CascadeReport]) -> Result<(), OutputError> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "n",
        "alpha",
        "p",
        "m_min",
        "tau",
        "f",
        "fprime",
        "max_recursion_gap",
        "passes",
    ])
    .map_err(|e| fail(path, e))?;
    for r in reports {
        w.write_record([
            r.n.to_string(),
            num(r.alpha),
            num(r.p),
            r.m_min.to_string(),
            num(r.tau_p),
            num(r.f_p),
            num(r.fprime_p),
            num(r.max_recursion_gap),
            r.passes().to_string(),
        ])
        .map_err(|e| fail(path, e))?;
    }
    finish(w, path)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), OutputError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| fail(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| fail(path, e))
}
