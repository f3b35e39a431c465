//! CSV rendering and atomic file output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::runner::RunReport;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // 17 significant digits
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// One CSV artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file_name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(file_name: &str, columns: &[&str]) -> Self {
        Self {
            file_name: file_name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.file_name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.iter().map(Cell::render).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Error)]
#[error("{}: {source}", path.display())]
pub struct ExportError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

/// Writes `contents` to a sibling temp file, then renames it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), ExportError> {
    let wrap = |source| ExportError {
        path: path.to_path_buf(),
        source,
    };
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(wrap)
}

/// Writes every table of `report` into `dir` and returns the paths.
pub fn export_csv(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, ExportError> {
    fs::create_dir_all(dir).map_err(|source| ExportError {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths = Vec::new();
    for table in &report.tables {
        let path = dir.join(&table.file_name);
        write_atomic(&path, table.to_csv().as_bytes())?;
        paths.push(path);
    }
    Ok(paths)
}

/// Human-readable summary next to the CSV files. Not byte-stable: it
/// records the wall-clock time.
pub fn export_summary(report: &RunReport, dir: &Path) -> Result<PathBuf, ExportError> {
    fs::create_dir_all(dir).map_err(|source| ExportError {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join("report.txt");
    write_atomic(&path, report.summary().as_bytes())?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(Cell::Num(0.1).render(), "1.0000000000000001e-1");
        assert_eq!(Cell::Num(-2.0).render(), "-2.0000000000000000e0");
        let x = 1.0 / 3.0;
        assert_eq!(Cell::Num(x).render().parse::<f64>().unwrap(), x);
        assert_eq!(Cell::Text("a,b".into()).render(), "\"a,b\"");
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new("x.csv", &["n", "v", "ok"]);
        t.push(vec![1usize.into(), 0.5.into(), true.into()]);
        t.push(vec![2usize.into(), Cell::Empty, false.into()]);
        assert_eq!(t.to_csv(), "n,v,ok\n1,5.0000000000000000e-1,true\n2,,false\n");
    }
}
