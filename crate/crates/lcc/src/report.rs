//! JSON and CSV writers. Output depends only on the values written: struct
//! fields serialize in declaration order and nothing time-dependent is
//! recorded.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Format(e.to_string()))?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| CliError::Io(path.clone(), e))?;
    Ok(path)
}

pub fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Format(e.to_string()))?;
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Format(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(path.clone(), e))?;
    Ok(path)
}

/// Space-separated worker ids, for CSV cells.
pub fn id_list<'a>(ids: impl IntoIterator<Item = &'a usize>) -> String {
    ids.into_iter().map(|j| j.to_string()).collect::<Vec<_>>().join(" ")
}

/// Rows of numbers; a first row that does not parse is taken as a header.
pub fn read_numeric_csv<T: std::str::FromStr>(path: &Path) -> Result<Vec<Vec<T>>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
        let parsed: Result<Vec<T>, _> = record.iter().map(str::parse).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(CliError::Format(format!("{}: row {} is not numeric", path.display(), i + 1))),
        }
    }
    if rows.is_empty() {
        return Err(CliError::Format(format!("{}: no data rows", path.display())));
    }
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(CliError::Format(format!("{}: rows differ in length", path.display())));
    }
    Ok(rows)
}
