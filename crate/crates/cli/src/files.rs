//! File access: hashing, CSV tables, JSON documents and atomic writes.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Inputs read so far, keyed by path, with their SHA-256 digests.
#[derive(Debug, Default, Serialize)]
pub struct Inputs(BTreeMap<String, String>);

impl Inputs {
    pub fn read(&mut self, path: &Path) -> CliResult<String> {
        let bytes = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.0.insert(path.display().to_string(), hex);
        String::from_utf8(bytes)
            .map_err(|_| CliError::Validation(format!("{} is not UTF-8", path.display())))
    }

    pub fn json<T: DeserializeOwned>(&mut self, path: &Path) -> CliResult<T> {
        let text = self.read(path)?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }

    /// Reads the named numeric columns of a CSV file with a header row.
    pub fn csv_columns(&mut self, path: &Path, names: &[&str]) -> CliResult<Vec<Vec<f64>>> {
        let text = self.read(path)?;
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| bad_csv(path, e))?.clone();
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                headers.iter().position(|h| h == *n).ok_or_else(|| {
                    CliError::Validation(format!("{}: missing column '{n}'", path.display()))
                })
            })
            .collect::<CliResult<_>>()?;
        let mut cols = vec![Vec::new(); names.len()];
        for (line, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| bad_csv(path, e))?;
            for (c, &i) in idx.iter().enumerate() {
                let field = rec.get(i).unwrap_or("");
                let v: f64 = field.parse().map_err(|_| {
                    CliError::Validation(format!(
                        "{}: row {}: '{field}' is not a number",
                        path.display(),
                        line + 2
                    ))
                })?;
                cols[c].push(v);
            }
        }
        Ok(cols)
    }
}

fn bad_csv(path: &Path, e: csv::Error) -> CliError {
    CliError::Validation(format!("{}: {e}", path.display()))
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("reports always serialize");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:.17e}")))
            .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    write_atomic(path, &bytes)
}
