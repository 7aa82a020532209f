use serde::Serialize;
use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(u64),
    Num(f64),
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}
impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

/// Output directory; every file written is listed in the manifest.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::io(format!("{}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.root.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// UTF-8, `.` decimals, LF line ends. Non-finite numbers abort.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> CliResult<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| CliError::io(format!("{name}: {e}"));
        w.write_record(header).map_err(io)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != header.len() {
                return Err(CliError::physics(format!("{name}: row {i} has {} cells", row.len())));
            }
            let mut fields = Vec::with_capacity(row.len());
            for (cell, col) in row.iter().zip(header) {
                fields.push(match cell {
                    Cell::Text(s) => s.clone(),
                    Cell::Int(v) => v.to_string(),
                    Cell::Num(v) if v.is_finite() => v.to_string(),
                    Cell::Num(v) => {
                        return Err(CliError::physics(format!("{name}: non-finite {col} = {v} in row {i}")))
                    }
                });
            }
            w.write_record(&fields).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::io(format!("{name}: {e}")))?;
        self.write(name, &bytes)
    }

    /// Pretty JSON with a trailing newline. serde_json writes non-finite
    /// floats as `null`, so summaries carry no optional fields and any null
    /// is treated as a non-finite number.
    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let v = serde_json::to_value(value).map_err(|e| CliError::physics(e.to_string()))?;
        if let Some(path) = find_null(&v, String::new()) {
            return Err(CliError::physics(format!("{name}: non-finite value at {path}")));
        }
        let mut text = serde_json::to_string_pretty(&v).map_err(|e| CliError::physics(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

fn find_null(v: &Value, path: String) -> Option<String> {
    match v {
        Value::Null => Some(if path.is_empty() { ".".into() } else { path }),
        Value::Array(a) => a.iter().enumerate().find_map(|(i, x)| find_null(x, format!("{path}[{i}]"))),
        Value::Object(o) => o.iter().find_map(|(k, x)| find_null(x, format!("{path}.{k}"))),
        _ => None,
    }
}
