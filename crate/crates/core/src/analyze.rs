//! Code-length quartile binning and table output.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::token;
use crate::{Error, Result};

/// Percentile `p` (0..=100) of an ascending slice, interpolating linearly
/// between the closest ranks (`pos = p/100 * (n-1)`).
///
/// Panics on an empty slice.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty slice");
    let pos = (p / 100.0).clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthBins {
    /// (q1, median, q3) in plaintext tokens.
    pub boundaries: (f64, f64, f64),
    /// Document ids per bin: `[0, q1)`, `[q1, q2)`, `[q2, q3)`, `[q3, inf)`.
    pub bins: [Vec<String>; 4],
}

impl LengthBins {
    pub fn sizes(&self) -> [usize; 4] {
        [
            self.bins[0].len(),
            self.bins[1].len(),
            self.bins[2].len(),
            self.bins[3].len(),
        ]
    }
}

/// Index of the bin a length falls in.
pub fn bin_of(len: f64, (q1, q2, q3): (f64, f64, f64)) -> usize {
    if len >= q3 {
        3
    } else if len >= q2 {
        2
    } else if len >= q1 {
        1
    } else {
        0
    }
}

pub fn quartiles(lengths: &[f64]) -> Result<(f64, f64, f64)> {
    if lengths.is_empty() {
        return Err(Error::EmptyInput("quartiles of an empty length set"));
    }
    let mut sorted = lengths.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok((
        percentile(&sorted, 25.0),
        percentile(&sorted, 50.0),
        percentile(&sorted, 75.0),
    ))
}

/// Bins `(id, length)` items by the quartiles of `reference` lengths.
pub fn bin_by_lengths(items: &[(String, f64)], reference: &[f64]) -> Result<LengthBins> {
    let boundaries = quartiles(reference)?;
    let mut bins: [Vec<String>; 4] = Default::default();
    for (id, len) in items {
        bins[bin_of(*len, boundaries)].push(id.clone());
    }
    Ok(LengthBins { boundaries, bins })
}

fn lengths(corpus: &Corpus) -> Vec<(String, f64)> {
    corpus
        .documents
        .iter()
        .map(|d| (d.id.clone(), token::length_of(d) as f64))
        .collect()
}

/// Splits a test set into four groups by the quartiles of its own token
/// lengths.
pub fn quartile_bins(test: &Corpus) -> Result<LengthBins> {
    quartile_bins_with_reference(test, test)
}

/// Like [`quartile_bins`] but takes the boundaries from `reference`
/// (e.g. the full target-language corpus).
pub fn quartile_bins_with_reference(test: &Corpus, reference: &Corpus) -> Result<LengthBins> {
    if test.is_empty() {
        return Err(Error::EmptyInput("quartile_bins needs a non-empty test set"));
    }
    let items = lengths(test);
    let reference: Vec<f64> = if std::ptr::eq(test, reference) {
        items.iter().map(|x| x.1).collect()
    } else {
        lengths(reference).into_iter().map(|x| x.1).collect()
    };
    bin_by_lengths(&items, &reference)
}

// ---------------------------------------------------------------------------
// Tables

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Null,
    Number(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Number(x) => Some(*x),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Number(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(b.to_string())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnFormat {
    #[default]
    Auto,
    /// Relative change in percent, shown as `+35.1%` in text tables.
    SignedPercent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    #[serde(default)]
    pub format: ColumnFormat,
}

impl Column {
    pub fn new(name: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            format: ColumnFormat::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Column::new).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    /// Two-column table from `(key, value)` pairs.
    pub fn from_pairs<'a>(
        key: &str,
        value: &str,
        pairs: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Self {
        let mut t = Table::new([key, value]);
        for (k, v) in pairs {
            t.push_row(vec![k.into(), v.into()]);
        }
        t
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(Error::InconsistentRows(format!(
                    "row {i} has {} cells, header has {}",
                    row.len(),
                    self.columns.len()
                )));
            }
        }
        Ok(())
    }

    /// Appends a column holding `100 * (value - baseline) / baseline` per row.
    /// Rows where either input is not a number, or the baseline is zero, get
    /// a null cell.
    pub fn add_improvement(&mut self, value: &str, baseline: &str, label: &str) -> Result<()> {
        self.validate()?;
        let vi = self
            .column_index(value)
            .ok_or_else(|| Error::InvalidArgument(format!("no column {value:?}")))?;
        let bi = self
            .column_index(baseline)
            .ok_or_else(|| Error::InvalidArgument(format!("no column {baseline:?}")))?;
        for row in &mut self.rows {
            let cell = match (row[vi].as_f64(), row[bi].as_f64()) {
                (Some(x), Some(b)) if b != 0.0 => Cell::Number(improvement_pct(x, b)),
                _ => Cell::Null,
            };
            row.push(cell);
        }
        self.columns.push(Column {
            name: label.to_owned(),
            format: ColumnFormat::SignedPercent,
        });
        Ok(())
    }
}

/// Relative improvement of `value` over `baseline`, in percent.
pub fn improvement_pct(value: f64, baseline: f64) -> f64 {
    100.0 * (value - baseline) / baseline
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "text" | "table" | "text-table" => Ok(ReportFormat::Text),
            other => Err(Error::InvalidArgument(format!(
                "unknown report format {other:?}"
            ))),
        }
    }
}

fn render_cell(cell: &Cell, format: ColumnFormat, text: bool) -> String {
    match (cell, format) {
        (Cell::Null, _) => String::new(),
        (Cell::Text(s), _) => s.clone(),
        (Cell::Number(x), ColumnFormat::SignedPercent) if text => format!("{x:+.1}%"),
        (Cell::Number(x), _) => format!("{x}"),
    }
}

pub fn emit_report(table: &Table, format: ReportFormat) -> Result<String> {
    table.validate()?;
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(table)?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(table.columns.iter().map(|c| c.name.as_str()))?;
            for row in &table.rows {
                w.write_record(
                    row.iter()
                        .zip(&table.columns)
                        .map(|(cell, col)| render_cell(cell, col.format, false)),
                )?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        ReportFormat::Text => Ok(text_table(table)),
    }
}

pub fn load_json_table(s: &str) -> Result<Table> {
    let table: Table = serde_json::from_str(s)?;
    table.validate()?;
    Ok(table)
}

fn text_table(table: &Table) -> String {
    let rendered: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .zip(&table.columns)
                .map(|(cell, col)| render_cell(cell, col.format, true))
                .collect()
        })
        .collect();
    let widths: Vec<usize> = table
        .columns
        .iter()
        .enumerate()
        .map(|(i, c)| {
            rendered
                .iter()
                .map(|r| r[i].chars().count())
                .chain(std::iter::once(c.name.chars().count()))
                .max()
                .unwrap_or(0)
        })
        .collect();

    let mut out = String::new();
    let line = |out: &mut String, cells: &mut dyn Iterator<Item = (usize, &str, bool)>| {
        let mut parts = Vec::new();
        for (i, s, right) in cells {
            let pad = widths[i] - s.chars().count();
            if right {
                parts.push(format!("{}{s}", " ".repeat(pad)));
            } else {
                parts.push(format!("{s}{}", " ".repeat(pad)));
            }
        }
        let joined = parts.join("  ");
        let _ = writeln!(out, "{}", joined.trim_end());
    };
    line(
        &mut out,
        &mut table
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.name.as_str(), false)),
    );
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    let _ = writeln!(out, "{}", rule.join("  "));
    for (row, cells) in table.rows.iter().zip(&rendered) {
        line(
            &mut out,
            &mut cells
                .iter()
                .enumerate()
                .map(|(i, s)| (i, s.as_str(), matches!(row[i], Cell::Number(_)))),
        );
    }
    out
}
