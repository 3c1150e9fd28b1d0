//! CSV emission, parsing and golden-file comparison.
//!
//! Numbers are written with 17 significant digits so every value round-trips exactly.

use std::fmt::Write as _;

use super::config::{Experiment, ExperimentConfig, Method};
use super::SweepRow;
use crate::lbc::bipartitions;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
/// Optional CSV columns.
pub struct ColumnSet {
    pub spectral: bool,
    pub factorized: bool,
    pub per_bipartition: bool,
}

/// Columns implied by a configuration's methods and flags.
pub fn column_set(config: &ExperimentConfig) -> ColumnSet {
    ColumnSet {
        spectral: config.methods.contains(&Method::Spectral),
        factorized: config.methods.contains(&Method::Factorized),
        per_bipartition: config.per_bipartition,
    }
}

pub(crate) fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn condition_cell(row: &SweepRow) -> String {
    if !row.errors.is_empty() {
        return "error".into();
    }
    row.condition.map(|c| c.tag().to_string()).unwrap_or_default()
}

pub(crate) fn header(exp: &Experiment, cols: &ColumnSet) -> Vec<String> {
    let mut h = vec![exp.parameter.column().to_string(), "lbc_direct".into()];
    if cols.spectral {
        h.push("lbc_spectral".into());
    }
    if cols.factorized {
        h.push("lbc_factorized".into());
    }
    h.push("condition".into());
    h.push("max_deviation".into());
    if cols.per_bipartition {
        let parts = bipartitions(exp.spec.n_qubits()).expect("validated qubit count");
        h.extend(parts.iter().map(|p| format!("c_{}", p.label())));
    }
    h
}

/// Renders sweep rows as LF-terminated CSV with a header row.
pub fn rows_to_csv(rows: &[SweepRow], exp: &Experiment, cols: &ColumnSet) -> String {
    let mut out = header(exp, cols).join(",");
    out.push('\n');
    let n_parts = (1usize << (exp.spec.n_qubits() - 1)) - 1;
    for row in rows {
        let mut cells = vec![fmt_num(row.grid_value), fmt_opt(row.lbc_direct)];
        if cols.spectral {
            cells.push(fmt_opt(row.lbc_spectral));
        }
        if cols.factorized {
            cells.push(fmt_opt(row.lbc_factorized));
        }
        cells.push(condition_cell(row));
        cells.push(fmt_num(row.max_deviation));
        if cols.per_bipartition {
            match &row.per_bipartition {
                Some(values) => cells.extend(values.iter().copied().map(fmt_num)),
                None => cells.extend(std::iter::repeat_n(String::new(), n_parts)),
            }
        }
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// A parsed CSV document.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric values of column `name`; empty cells become `None`.
    pub fn numbers(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.column(name)?;
        Some(self.rows.iter().map(|r| r.get(idx).and_then(|c| c.parse().ok())).collect())
    }
}

/// Parses the unquoted CSV this tool writes.
pub fn parse_csv(text: &str) -> CsvTable {
    let mut lines = text.lines().filter(|l| !l.is_empty());
    let split = |l: &str| l.split(',').map(str::to_string).collect::<Vec<_>>();
    let header = lines.next().map(split).unwrap_or_default();
    CsvTable { header, rows: lines.map(split).collect() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenMismatch {
    pub row: usize,
    pub column: String,
    pub expected: String,
    pub actual: String,
}

impl std::fmt::Display for GoldenMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "row {} column {}: expected {:?}, got {:?}", self.row, self.column, self.expected, self.actual)
    }
}

/// Compares `actual` against `golden` cell by cell: numbers within `tol`, everything else exactly.
pub fn compare_golden(actual: &CsvTable, golden: &CsvTable, tol: f64) -> Result<(), GoldenMismatch> {
    if actual.header != golden.header {
        return Err(GoldenMismatch {
            row: 0,
            column: "<header>".into(),
            expected: golden.header.join(","),
            actual: actual.header.join(","),
        });
    }
    if actual.rows.len() != golden.rows.len() {
        return Err(GoldenMismatch {
            row: actual.rows.len().min(golden.rows.len()) + 1,
            column: "<rows>".into(),
            expected: golden.rows.len().to_string(),
            actual: actual.rows.len().to_string(),
        });
    }
    for (i, (a_row, g_row)) in actual.rows.iter().zip(&golden.rows).enumerate() {
        for (j, name) in golden.header.iter().enumerate() {
            let a = a_row.get(j).map(String::as_str).unwrap_or("");
            let g = g_row.get(j).map(String::as_str).unwrap_or("");
            let same = match (a.parse::<f64>(), g.parse::<f64>()) {
                (Ok(x), Ok(y)) => (x - y).abs() <= tol,
                _ => a == g,
            };
            if !same {
                return Err(GoldenMismatch { row: i + 1, column: name.clone(), expected: g.into(), actual: a.into() });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 1.0, 0.1, 1.0 / 3.0, 0.11967, 2.5e-300, f64::MIN_POSITIVE] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn golden_comparison() {
        let a = parse_csv("p,lbc\n0.0,1.0\n0.5,0.5\n");
        assert!(compare_golden(&a, &a, 0.0).is_ok());
        let b = parse_csv("p,lbc\n0.0,1.0\n0.5,0.5000000001\n");
        assert!(compare_golden(&a, &b, 1e-12).is_err());
        assert!(compare_golden(&a, &b, 1e-9).is_ok());
        let c = parse_csv("p,lbc,x\n0.0,1.0,a\n0.5,0.5,b\n");
        assert_eq!(compare_golden(&a, &c, 1.0).unwrap_err().column, "<header>");
        let d = parse_csv("p,lbc\n0.0,1.0\n");
        assert_eq!(compare_golden(&a, &d, 1.0).unwrap_err().column, "<rows>");
    }
}
