//! Report files: JSON summaries and CSV fields, overwritten in place.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use quasilin::analysis::BranchTrace;
use quasilin::solver::SolveOutcome;

use crate::CliError;

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Output(format!("{}: {e}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<PathBuf, CliError> {
    fs::write(path, text).map_err(|e| io_error(path, e))?;
    Ok(path.to_path_buf())
}

pub fn write_json(path: &Path, value: &Value) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

/// `summary.json` and `field.csv`, plus `companion.csv` when the outcome
/// carries the transformed field.
pub fn write_outcome(outcome: &SolveOutcome, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    ensure_dir(dir)?;
    let field = write_text(&dir.join("field.csv"), &outcome.field.to_csv())?;
    let mut files = Vec::new();
    let mut summary = outcome.to_json(Some("field.csv"));
    if let Some(c) = &outcome.companion {
        files.push(write_text(&dir.join("companion.csv"), &c.to_csv())?);
        summary["companion_csv"] = Value::from("companion.csv");
    }
    files.insert(0, field);
    files.insert(0, write_json(&dir.join("summary.json"), &summary)?);
    Ok(files)
}

/// `branch.csv` with columns `lambda,status,sup_norm,w1p_seminorm,iterations`.
pub fn write_trace(trace: &BranchTrace, dir: &Path) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    write_text(&dir.join("branch.csv"), &trace.to_csv())
}
