//! Run reports: a line-oriented key/value summary plus CSV histories.
//!
//! The report file has one `key = value` pair per line, in a fixed order:
//! `method, r, mu, outer_iters, inner_iters, mse, psnr, seed`. Floating
//! point values use Rust's shortest round-trip formatting, and an infinite
//! PSNR (perfect recovery) serializes as the string `inf`, which `f64`
//! parsing understands natively.
//!
//! Next to the report, [`save_report`] writes a residual-history CSV with
//! header `iter,outer_residual,objective` and one row per outer iteration,
//! at the report path with its extension replaced by `csv`.
//!
//! Rank sweeps get their own CSV with header `r,psnr,outer_iters,inner_iters`
//! and one row per tested rank.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use tcomp_core::{RecoveryScore, SolverReport};

/// Errors from writing or parsing report artifacts.
#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {detail}")]
    Malformed { path: String, detail: String },
}

impl ReportError {
    fn io(path: &Path, source: std::io::Error) -> ReportError {
        ReportError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    fn malformed(path: &Path, detail: impl Into<String>) -> ReportError {
        ReportError::Malformed {
            path: path.display().to_string(),
            detail: detail.into(),
        }
    }
}

/// The scalar fields of a written report, as recovered by [`parse_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedReport {
    pub method: String,
    pub r: usize,
    pub mu: f64,
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub mse: f64,
    pub psnr: f64,
    pub seed: u64,
}

/// Path of the residual-history CSV written alongside a report.
pub fn history_path(report_path: &Path) -> PathBuf {
    report_path.with_extension("csv")
}

/// Writes the report file and its sibling residual-history CSV.
pub fn save_report(
    report: &SolverReport,
    score: &RecoveryScore,
    seed: u64,
    path: &Path,
) -> Result<(), ReportError> {
    let mut text = String::new();
    let _ = writeln!(text, "method = {}", report.method);
    let _ = writeln!(text, "r = {}", report.config.r);
    let _ = writeln!(text, "mu = {}", report.config.mu);
    let _ = writeln!(text, "outer_iters = {}", report.outer_iterations);
    let _ = writeln!(text, "inner_iters = {}", report.total_inner_iterations);
    let _ = writeln!(text, "mse = {}", score.mse);
    let _ = writeln!(text, "psnr = {}", score.psnr);
    let _ = writeln!(text, "seed = {seed}");
    fs::write(path, text).map_err(|e| ReportError::io(path, e))?;

    let mut csv = String::from("iter,outer_residual,objective\n");
    for (idx, (residual, objective)) in report
        .outer_residuals
        .iter()
        .zip(&report.objective_history)
        .enumerate()
    {
        let _ = writeln!(csv, "{},{residual},{objective}", idx + 1);
    }
    let csv_path = history_path(path);
    fs::write(&csv_path, csv).map_err(|e| ReportError::io(&csv_path, e))
}

/// Parses a file written by [`save_report`] back into its scalar fields.
pub fn parse_report(path: &Path) -> Result<ParsedReport, ReportError> {
    let text = fs::read_to_string(path).map_err(|e| ReportError::io(path, e))?;
    let field = |key: &str| -> Result<String, ReportError> {
        for line in text.lines() {
            if let Some((k, v)) = line.split_once(" = ") {
                if k == key {
                    return Ok(v.to_string());
                }
            }
        }
        Err(ReportError::malformed(path, format!("missing key {key}")))
    };
    let parse_num = |key: &str, raw: String| -> Result<f64, ReportError> {
        raw.parse::<f64>()
            .map_err(|_| ReportError::malformed(path, format!("bad value for {key}: {raw}")))
    };

    let method = field("method")?;
    let r = parse_num("r", field("r")?)? as usize;
    let mu = parse_num("mu", field("mu")?)?;
    let outer_iters = parse_num("outer_iters", field("outer_iters")?)? as usize;
    let inner_iters = parse_num("inner_iters", field("inner_iters")?)? as usize;
    let mse = parse_num("mse", field("mse")?)?;
    let psnr = parse_num("psnr", field("psnr")?)?;
    let seed = field("seed")?
        .parse::<u64>()
        .map_err(|_| ReportError::malformed(path, "bad value for seed".to_string()))?;
    Ok(ParsedReport {
        method,
        r,
        mu,
        outer_iters,
        inner_iters,
        mse,
        psnr,
        seed,
    })
}

/// One row of a rank-sweep summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub r: usize,
    pub psnr: f64,
    pub outer_iters: usize,
    pub inner_iters: usize,
}

/// Writes the rank-sweep CSV (`r,psnr,outer_iters,inner_iters`).
pub fn save_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), ReportError> {
    let mut csv = String::from("r,psnr,outer_iters,inner_iters\n");
    for row in rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            row.r, row.psnr, row.outer_iters, row.inner_iters
        );
    }
    fs::write(path, csv).map_err(|e| ReportError::io(path, e))
}
