//! Configuration ingestion, sweeps, presets and file outputs for the command-line tool.

mod config;
mod output;
mod preset;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

pub use config::{
    ChannelConfig, Experiment, ExperimentConfig, GridConfig, GridParameter, Method, StateConfig, ToleranceConfig,
};
pub use output::{column_set, compare_golden, parse_csv, rows_to_csv, ColumnSet, CsvTable, GoldenMismatch};
pub use preset::{run_preset, sudden_death_threshold, Preset, PRESET_SPECTRAL_CAP};

use crate::factorization::{verify_points, PointReport, VerificationReport};

/// One row of a sweep: every route at a single grid value.
pub type SweepRow = PointReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_TOLERANCE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config field `{field}`: {message}")]
    Invalid { field: String, message: String },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("unknown preset `{0}`; expected one of fig1, fig2a, fig2b, fig2c, esd")]
    UnknownPreset(String),
    #[error("grid size must be at least 2, got {0}")]
    GridTooSmall(usize),
    #[error("tolerance exceeded: {0}")]
    Tolerance(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("golden file: {0}")]
    Golden(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Read { .. } | CliError::UnknownPreset(_) | CliError::GridTooSmall(_) => {
                EXIT_CONFIG
            }
            CliError::Tolerance(_) | CliError::Golden(_) => EXIT_TOLERANCE,
            CliError::Write { .. } | CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    Ok(ExperimentConfig::from_json(&text)?)
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| CliError::Write { path: parent.to_path_buf(), source })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

/// Evaluates the configured routes at every grid point.
pub fn run_evolve(config: &ExperimentConfig) -> Result<Vec<SweepRow>, CliError> {
    let exp = config.validate()?;
    Ok(verify_points(&exp.spec, &exp.noise, &exp.points, &exp.options).points)
}

/// CSV text for a configuration's sweep.
pub fn evolve_csv(config: &ExperimentConfig) -> Result<String, CliError> {
    let exp = config.validate()?;
    let rows = verify_points(&exp.spec, &exp.noise, &exp.points, &exp.options).points;
    Ok(rows_to_csv(&rows, &exp, &output::column_set(config)))
}

/// Full JSON document written by `verify`.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyDocument {
    pub artifact_version: &'static str,
    pub config: ExperimentConfig,
    #[serde(flatten)]
    pub report: VerificationReport,
}

/// Runs every available route (spectral included) and collects the cross-check report.
pub fn run_verify(config: &ExperimentConfig, tol_override: Option<f64>) -> Result<VerifyDocument, CliError> {
    let mut exp = config.validate()?;
    exp.options.spectral = true;
    exp.options.factorized = true;
    if let Some(tol) = tol_override {
        if !(tol >= 0.0) {
            return Err(
                ConfigError::Invalid { field: "--tol".into(), message: format!("{tol} is not a tolerance") }.into()
            );
        }
        exp.options.tolerances.spectral = tol;
        exp.options.tolerances.factorized = tol;
    }
    let report = verify_points(&exp.spec, &exp.noise, &exp.points, &exp.options);
    Ok(VerifyDocument { artifact_version: env!("CARGO_PKG_VERSION"), config: config.clone(), report })
}

/// Outcome of a verify run as a CLI error, if any.
pub fn verify_status(doc: &VerifyDocument) -> Result<(), CliError> {
    let summary = &doc.report.summary;
    if summary.error_points > 0 {
        let first = doc.report.points.iter().find_map(|p| p.errors.first()).cloned().unwrap_or_default();
        return Err(CliError::Numerical(format!("{} point(s) failed; first: {first}", summary.error_points)));
    }
    if summary.tolerance_violations > 0 {
        return Err(CliError::Tolerance(format!(
            "{} point(s) out of tolerance, max deviation {:e}",
            summary.tolerance_violations, summary.max_deviation
        )));
    }
    Ok(())
}

pub fn verify_json(doc: &VerifyDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("report serializes");
    text.push('\n');
    text
}
