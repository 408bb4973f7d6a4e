//! Regression comparison of two run directories: per-column max-abs-diff for
//! every shared data file, with a pass/fail verdict against a tolerance.

use std::path::Path;

use crate::error::{CliError, Result};
use crate::table::Table;

#[derive(Debug)]
pub struct ColumnReport {
    pub file: String,
    pub column: String,
    pub max_abs_diff: f64,
}

#[derive(Debug)]
pub struct CompareReport {
    pub columns: Vec<ColumnReport>,
    pub tolerance: f64,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.columns.iter().all(|c| c.max_abs_diff <= self.tolerance)
    }
}

fn data_files(dir: &Path) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.ends_with(".dat") {
            names.push(name);
        }
    }
    names.sort();
    Ok(names)
}

pub fn compare(dir_a: &Path, dir_b: &Path, tolerance: f64) -> Result<CompareReport> {
    let files_a = data_files(dir_a)?;
    let files_b = data_files(dir_b)?;
    if files_a != files_b {
        return Err(CliError::Schema(format!(
            "file sets differ: {files_a:?} vs {files_b:?}"
        )));
    }
    if files_a.is_empty() {
        return Err(CliError::Schema(format!(
            "no .dat files found in {}",
            dir_a.display()
        )));
    }
    let mut columns = Vec::new();
    for name in &files_a {
        let a = Table::read(&dir_a.join(name))?;
        let b = Table::read(&dir_b.join(name))?;
        if a.columns != b.columns {
            return Err(CliError::Schema(format!(
                "{name}: column names differ: {:?} vs {:?}",
                a.columns, b.columns
            )));
        }
        if a.rows.len() != b.rows.len() {
            return Err(CliError::Schema(format!(
                "{name}: row counts differ: {} vs {}",
                a.rows.len(),
                b.rows.len()
            )));
        }
        for (i, col) in a.columns.iter().enumerate() {
            let max_abs_diff = a
                .rows
                .iter()
                .zip(&b.rows)
                .map(|(ra, rb)| (ra[i] - rb[i]).abs())
                .fold(0.0_f64, f64::max);
            columns.push(ColumnReport {
                file: name.clone(),
                column: col.clone(),
                max_abs_diff,
            });
        }
    }
    Ok(CompareReport { columns, tolerance })
}
