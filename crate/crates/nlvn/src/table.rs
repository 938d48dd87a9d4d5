//! Numeric CSV tables: one `#` stamp line, a header row, then rows of
//! doubles printed with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub stamp: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(stamp: impl Into<String>, columns: Vec<String>) -> Self {
        Self { stamp: stamp.into(), columns, rows: Vec::new() }
    }

    pub fn with_rows(mut self, rows: Vec<Vec<f64>>) -> Self {
        self.rows = rows;
        self
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in self.stamp.lines() {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                first = false;
                let _ = write!(out, "{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        fs::write(path, self.render()).map_err(|e| CliError::io(path, e))
    }

    /// Parses text produced by [`render`](Self::render).
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut stamp = Vec::new();
        let mut lines = text.lines();
        let header = loop {
            match lines.next() {
                Some(l) if l.starts_with('#') => stamp.push(l.trim_start_matches('#').trim_start().to_string()),
                Some(l) => break l,
                None => return Err(CliError::validation("table has no header row")),
            }
        };
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::validation(format!("row {}: {e}", n + 1)))?;
            if row.len() != columns.len() {
                return Err(CliError::validation(format!(
                    "row {} has {} fields, expected {}",
                    n + 1,
                    row.len(),
                    columns.len()
                )));
            }
            rows.push(row);
        }
        Ok(Self { stamp: stamp.join("\n"), columns, rows })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }
}
