//! Run reports: a deterministic body (hashed) under a volatile header
//! (timestamps and wall-clock, excluded from the hash).
//!
//! Re-running with the same config and seed reproduces every body field
//! bit-exactly, so the content hash is stable; the header carries everything
//! that legitimately varies between runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::geometry::GeometryReport;
use crate::verify::harness::CheckSummary;
use crate::verify::{AppendixReport, BoundParams};

use super::config::ExperimentConfig;
use super::CliError;

/// A check that was requested but could not run, with the reason.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkippedCheck {
    pub name: String,
    pub reason: String,
}

/// Wall-clock accounting (header only — never hashed).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct WallClock {
    pub total_seconds: f64,
    pub per_stage_seconds: BTreeMap<String, f64>,
}

/// Volatile metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportHeader {
    /// Seconds since the Unix epoch at report creation.
    pub generated_at_unix_seconds: u64,
    /// Where the report was written.
    pub out_dir: String,
    pub wall_clock: WallClock,
    /// `sha256:<hex>` over the canonical JSON serialization of `body`.
    pub content_hash: String,
}

/// Deterministic run outcome (the hashed content).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportBody {
    /// Artifact name and version that produced the report.
    pub artifact: String,
    /// Effective configuration (after command-line overrides).
    pub config: ExperimentConfig,
    pub effective_seed: u64,
    pub geometry: GeometryReport,
    /// Present unless the necessary condition failed.
    pub bounds: Option<BoundParams>,
    /// Reason the bound calculus was unavailable (margin ≤ 0, degenerate
    /// geometry); its presence fails the run.
    pub violation: Option<String>,
    /// Aggregate summaries of every check that ran, in execution order.
    pub checks: Vec<CheckSummary>,
    /// Checks that were requested but did not run, with reasons.
    pub skipped: Vec<SkippedCheck>,
    /// Appendix tail aggregate, when that check ran.
    pub appendix: Option<AppendixReport>,
    /// Fraction of recovery-trial queries whose drawn noise exceeded the
    /// working level (measured, never conditioned away).
    pub noise_exceed_fraction: Option<f64>,
    /// Solve-budget accounting.
    pub solves_estimated: u64,
    pub budget_max_solves: u64,
    /// Whether per-trial records were written to trials.jsonl.
    pub trials_emitted: bool,
    /// True when every emitted summary passed and no violation occurred.
    pub all_pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub header: ReportHeader,
    pub body: ReportBody,
}

/// Canonical serialization of the body — the hashed bytes.
pub fn body_bytes(body: &ReportBody) -> Result<Vec<u8>, CliError> {
    serde_json::to_vec(body).map_err(|e| CliError::Config {
        detail: format!("cannot serialize report body: {e}"),
    })
}

pub fn content_hash(body: &ReportBody) -> Result<String, CliError> {
    let bytes = body_bytes(body)?;
    Ok(format!("sha256:{:x}", Sha256::digest(&bytes)))
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

/// Assemble the header, hash the body, and write `report.json` (and
/// `trials.jsonl` when records are present). Returns the finished report.
pub fn write_report(
    out_dir: &Path,
    body: ReportBody,
    wall_clock: WallClock,
    trial_records: &[String],
) -> Result<RunReport, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let content_hash = content_hash(&body)?;
    let generated_at_unix_seconds = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let report = RunReport {
        header: ReportHeader {
            generated_at_unix_seconds,
            out_dir: out_dir.display().to_string(),
            wall_clock,
            content_hash,
        },
        body,
    };
    let path = out_dir.join("report.json");
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Config {
        detail: format!("cannot serialize report: {e}"),
    })?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| io_err(&path, e))?;

    if report.body.trials_emitted {
        let path = out_dir.join("trials.jsonl");
        let mut out = String::new();
        for line in trial_records {
            out.push_str(line);
            out.push('\n');
        }
        std::fs::write(&path, out).map_err(|e| io_err(&path, e))?;
    }
    Ok(report)
}

/// Read `report.json` back.
pub fn read_report(out_dir: &Path) -> Result<RunReport, CliError> {
    let path = out_dir.join("report.json");
    let text = std::fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config {
        detail: format!("{}: report does not parse: {e}", path.display()),
    })
}

/// Recompute the body hash and compare with the stored one.
pub fn verify_hash(report: &RunReport) -> Result<(), String> {
    let recomputed = content_hash(&report.body).map_err(|e| e.to_string())?;
    if recomputed == report.header.content_hash {
        Ok(())
    } else {
        Err(format!(
            "content hash mismatch: stored {}, recomputed {}",
            report.header.content_hash, recomputed
        ))
    }
}

/// One JSONL trial record. `check` names the producing check; the remaining
/// fields identify the trial within it.
pub fn trial_line<T: Serialize>(
    check: &str,
    keys: &[(&str, usize)],
    record: &T,
) -> Result<String, CliError> {
    let mut map = serde_json::Map::new();
    map.insert("check".into(), serde_json::Value::String(check.to_string()));
    for (name, value) in keys {
        map.insert((*name).into(), serde_json::Value::from(*value as u64));
    }
    let value = serde_json::to_value(record).map_err(|e| CliError::Config {
        detail: format!("cannot serialize trial record: {e}"),
    })?;
    map.insert("record".into(), value);
    serde_json::to_string(&serde_json::Value::Object(map)).map_err(|e| CliError::Config {
        detail: format!("cannot serialize trial record: {e}"),
    })
}

/// Errors that prevented the run from starting are still reported to disk
/// where possible; this type is shared by the run and sweep drivers.
#[derive(Debug)]
pub struct ReportPaths {
    pub report: PathBuf,
    pub trials: Option<PathBuf>,
}
