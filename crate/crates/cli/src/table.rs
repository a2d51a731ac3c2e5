//! Result tables and their CSV form.
//!
//! A table is written as `#`-prefixed `key: value` metadata lines, a header
//! row and one record per row. Numbers use scientific notation with nine
//! significant digits; columns left empty when not computed.

use std::io::Write;
use std::path::Path;

use crate::error::{CliError, Result};

pub const COLUMNS: [&str; 8] = ["a_m", "F_neq_N", "F_eq_N", "ratio", "f_tilde_N", "delta_N", "err_N", "T_g_K"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    /// Separation, m.
    pub a: f64,
    pub f_neq: f64,
    /// `F_eq(a, T_E)`, when the ratio was requested.
    pub f_eq: Option<f64>,
    /// `F_neq / F_eq`.
    pub ratio: Option<f64>,
    /// `F̃(a, T_E; T_g)`.
    pub f_tilde: f64,
    /// Evanescent-wave addition.
    pub delta: f64,
    /// Absolute error estimate of `f_neq`.
    pub err: f64,
    /// Graphene temperature, K.
    pub t_g: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Rows for one graphene temperature, in table order.
    pub fn block(&self, t_g: f64) -> Vec<Row> {
        self.rows.iter().copied().filter(|r| r.t_g == t_g).collect()
    }
}

pub fn format_number(x: f64) -> String {
    format!("{x:.8e}")
}

fn format_optional(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

pub fn to_csv_string(table: &Table) -> Result<String> {
    if table.rows.is_empty() {
        return Err(CliError::Parse("refusing to emit an empty table".into()));
    }
    let mut out = String::new();
    for (k, v) in &table.metadata {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Parse(e.to_string());
    w.write_record(COLUMNS).map_err(csv_err)?;
    for r in &table.rows {
        w.write_record([
            format_number(r.a),
            format_number(r.f_neq),
            format_optional(r.f_eq),
            format_optional(r.ratio),
            format_number(r.f_tilde),
            format_number(r.delta),
            format_number(r.err),
            format_number(r.t_g),
        ])
        .map_err(csv_err)?;
    }
    let body = w.into_inner().map_err(|e| CliError::Parse(e.to_string()))?;
    out.push_str(&String::from_utf8(body).expect("CSV of ASCII fields"));
    Ok(out)
}

pub fn parse_csv(text: &str) -> Result<Table> {
    let mut metadata = Vec::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        let body = line.trim_start_matches('#').trim();
        let (k, v) =
            body.split_once(": ").ok_or_else(|| CliError::Parse(format!("metadata line without key: {line:?}")))?;
        metadata.push((k.to_string(), v.to_string()));
    }
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| CliError::Parse(e.to_string()))?;
    if header.iter().ne(COLUMNS) {
        return Err(CliError::Parse(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Parse(e.to_string()))?;
        let field = |j: usize| -> Result<Option<f64>> {
            let s = rec.get(j).unwrap_or("");
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| CliError::Parse(format!("row {i}, column {}: {s:?}", COLUMNS[j])))
        };
        let required = |j: usize| -> Result<f64> {
            field(j)?.ok_or_else(|| CliError::Parse(format!("row {i}: empty {}", COLUMNS[j])))
        };
        rows.push(Row {
            a: required(0)?,
            f_neq: required(1)?,
            f_eq: field(2)?,
            ratio: field(3)?,
            f_tilde: required(4)?,
            delta: required(5)?,
            err: required(6)?,
            t_g: required(7)?,
        });
    }
    if rows.is_empty() {
        return Err(CliError::Parse("table has no rows".into()));
    }
    Ok(Table { metadata, rows })
}

/// Writes the CSV to `path`, or to stdout when `path` is `None`.
pub fn emit_csv(table: &Table, path: Option<&Path>) -> Result<()> {
    let text = to_csv_string(table)?;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e)),
    }
}
