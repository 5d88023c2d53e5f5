//! Comma-separated tables with a mandatory header row.
//!
//! Numbers use the shortest decimal that parses back to the same `f64`.
//! Lines end in `\n`; optional leading comment lines start with `#`.

use std::path::Path;

use thiserror::Error;

use crate::dynamics::TimeSeries;
use crate::measures;

use super::{fmt_num, write_file, IoError};

/// Column order of every time-series file.
pub const TIMESERIES_COLUMNS: [&str; 14] = [
    "t",
    "P0",
    "P1",
    "P2",
    "re01",
    "im01",
    "re02",
    "im02",
    "re12",
    "im12",
    "cd",
    "purity",
    "trace_err",
    "herm_defect",
];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("no data rows to write")]
    EmptyData,
    #[error("row {row} has {got} fields, header has {want}")]
    RaggedRow { row: usize, got: usize, want: usize },
    #[error(transparent)]
    Io(#[from] IoError),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table { header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    fn check(&self) -> Result<(), CsvError> {
        if self.rows.is_empty() {
            return Err(CsvError::EmptyData);
        }
        let want = self.header.len();
        match self.rows.iter().position(|r| r.len() != want) {
            Some(row) => Err(CsvError::RaggedRow { row, got: self.rows[row].len(), want }),
            None => Ok(()),
        }
    }

    pub fn render(&self, comments: &[String]) -> Result<String, CsvError> {
        self.check()?;
        let mut out = String::new();
        for c in comments {
            for line in c.lines() {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        Ok(out)
    }
}

/// Header and one line per row; nothing else.
pub fn write_csv(table: &Table, path: &Path) -> Result<(), CsvError> {
    write_csv_with_comments(table, &[], path)
}

pub fn write_csv_with_comments(table: &Table, comments: &[String], path: &Path) -> Result<(), CsvError> {
    let text = table.render(comments)?;
    Ok(write_file(path, text.as_bytes())?)
}

/// Parses text produced by [`Table::render`], returning comments and table.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Table), String> {
    let mut comments = Vec::new();
    let mut lines = text.split_terminator('\n').peekable();
    while let Some(c) = lines.peek().and_then(|l| l.strip_prefix('#')) {
        comments.push(c.trim_start().to_string());
        lines.next();
    }
    let header = lines.next().ok_or("missing header row")?;
    if header.contains('\r') {
        return Err("CR line ending".into());
    }
    let mut table = Table::new(&header.split(',').collect::<Vec<_>>());
    for (k, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|f| f.parse::<f64>().map_err(|e| format!("row {k}: `{f}`: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != table.header.len() {
            return Err(format!("row {k}: {} fields, header has {}", row.len(), table.header.len()));
        }
        table.push(row);
    }
    Ok((comments, table))
}

/// One row per sample in [`TIMESERIES_COLUMNS`] order. `cd` is NaN where
/// the state is too far from a density matrix for the entropy to exist.
pub fn timeseries_table(ts: &TimeSeries) -> Table {
    let mut table = Table::new(&TIMESERIES_COLUMNS);
    for ((&t, s), d) in ts.times.iter().zip(&ts.states).zip(&ts.diagnostics) {
        let m = s.matrix();
        // paper-mode samples may carry an anti-Hermitian part; herm_defect reports it
        let (h, _) = measures::symmetrize(m);
        let cd = measures::distillable_coherence(&h).unwrap_or(f64::NAN);
        table.push(vec![
            t,
            m[(0, 0)].re,
            m[(1, 1)].re,
            m[(2, 2)].re,
            m[(0, 1)].re,
            m[(0, 1)].im,
            m[(0, 2)].re,
            m[(0, 2)].im,
            m[(1, 2)].re,
            m[(1, 2)].im,
            cd,
            measures::purity(m),
            d.trace_error,
            d.hermiticity_defect,
        ]);
    }
    table
}
