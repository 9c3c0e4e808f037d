//! Batch front end for the PV workspace.
//!
//! A [`JobConfig`] (JSON, complex numbers as `[re, im]`) selects parameters and
//! options; [`run`] executes one [`Command`] and returns an [`Outcome`] holding
//! the JSON result document, an optional plot table and the exit status.
//! The same config always produces the same document: no timings, no hash-map
//! ordering, and parallel sweeps keep input order.

pub mod commands;
pub mod config;

use std::fmt::Write as _;
use std::path::Path;

pub use commands::{run, Command};
pub use config::{
    matrix_doc, matrix_from_doc, parse_complex, parse_range, FormulaChoice, JobConfig, MatrixDoc, OrderChoice,
    ParameterConfig, StoredMonodromy, TruncationLevel,
};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// Process exit status: 2 for bad input, 3 for numerical failure, 4 for a
    /// violated invariant, 1 for output errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Invariant(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

/// The JSON document written for every run.
#[derive(Debug, Clone, Serialize)]
pub struct Document {
    pub command: &'static str,
    pub version: &'static str,
    /// The effective configuration, tolerances included.
    pub config: JobConfig,
    pub result: serde_json::Value,
    /// Set when the run ended with a failure; the result then holds what was computed before it.
    pub error: Option<String>,
}

impl Document {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents contain only serialisable data");
        s.push('\n');
        s
    }
}

/// Rows for plotting. Cells are pre-formatted so that `f64` values keep their
/// shortest round-trip representation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// CSV text: a `#` comment line naming the columns, then a header row and the data.
    pub fn to_csv(&self, command: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# pv5 {command}: columns {}", self.columns.join(", "));
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub document: Document,
    pub table: Option<Table>,
    pub status: Result<(), CliError>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.status.as_ref().err().map_or(0, CliError::exit_code)
    }

    /// Write the JSON document to `out` (stdout when `None`) and the table to `csv`.
    pub fn emit(&self, out: Option<&Path>, csv: Option<&Path>) -> Result<(), CliError> {
        let json = self.document.to_json();
        match out {
            Some(path) => std::fs::write(path, json).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
            None => print!("{json}"),
        }
        if let Some(path) = csv {
            let table = self.table.clone().unwrap_or_default();
            std::fs::write(path, table.to_csv(self.document.command))
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }
}
