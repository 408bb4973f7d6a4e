//! Plot-ready column-oriented text files: '#'-prefixed header comments, one
//! space-separated row per grid point, every value in full-precision
//! scientific notation so identical runs are byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Column names including units, e.g. `tau_ns`.
    pub columns: Vec<String>,
    /// Row-major data; every row has `columns.len()` entries.
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Render with a preamble of header comments (written as `# key = value`).
    pub fn render(&self, preamble: &[(&str, String)]) -> String {
        let mut out = String::new();
        for (k, v) in preamble {
            writeln!(out, "# {k} = {v}").unwrap();
        }
        writeln!(out, "# columns: {}", self.columns.join(" ")).unwrap();
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{v:.16e}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path, preamble: &[(&str, String)]) -> Result<()> {
        std::fs::write(path, self.render(preamble))?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut columns = Vec::new();
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(cols) = rest.trim().strip_prefix("columns:") {
                    columns = cols.split_whitespace().map(|c| c.to_string()).collect();
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.split_whitespace().map(|v| v.parse::<f64>()).collect();
            let row = row.map_err(|e| {
                CliError::Schema(format!(
                    "{}:{}: unparseable value ({e})",
                    path.display(),
                    lineno + 1
                ))
            })?;
            if !columns.is_empty() && row.len() != columns.len() {
                return Err(CliError::Schema(format!(
                    "{}:{}: {} values for {} columns",
                    path.display(),
                    lineno + 1,
                    row.len(),
                    columns.len()
                )));
            }
            rows.push(row);
        }
        if columns.is_empty() {
            return Err(CliError::Schema(format!(
                "{}: missing '# columns:' header",
                path.display()
            )));
        }
        Ok(Self { columns, rows })
    }

    /// The values of one named column.
    #[cfg_attr(not(test), allow(dead_code))]
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_round_trip() {
        let mut t = Table::new(&["tau_ns", "p_e"]);
        t.push(vec![0.0, 1.0]);
        t.push(vec![2.5, 0.987654321012345678]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.dat");
        t.write(&path, &[("experiment", "rabi".into())]).unwrap();
        let back = Table::read(&path).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.column("tau_ns"), Some(vec![0.0, 2.5]));
        assert_eq!(back.column("missing"), None);
    }

    #[test]
    fn render_is_lf_and_full_precision() {
        let mut t = Table::new(&["x"]);
        t.push(vec![1.0 / 3.0]);
        let s = t.render(&[]);
        assert!(!s.contains('\r'));
        assert!(s.contains("3.3333333333333331e-1"));
    }
}
