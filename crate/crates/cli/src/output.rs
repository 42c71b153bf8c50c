//! Output files. Every CSV starts with a `#` provenance line; every JSON
//! document carries a `provenance` object. Floats are written in shortest
//! round-trip form, so identical runs give identical bytes.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
}

impl Provenance {
    pub fn new(config: &RunConfig, seed: u64) -> Self {
        Self { config_sha256: config.hash(), seed, version: VERSION.to_string() }
    }

    pub fn line(&self) -> String {
        format!("# dpgrid {} config_sha256={} seed={}", self.version, self.config_sha256, self.seed)
    }
}

pub fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

/// Writes the provenance line, then serializes every row with a header.
pub fn write_csv<T: Serialize>(path: &Path, prov: &Provenance, rows: &[T]) -> Result<()> {
    let mut file = File::create(path).map_err(|e| CliError::io(path, e))?;
    writeln!(file, "{}", prov.line()).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

/// Like [`write_csv`] for rows without a serde shape.
pub fn write_csv_records(path: &Path, prov: &Provenance, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut file = File::create(path).map_err(|e| CliError::io(path, e))?;
    writeln!(file, "{}", prov.line()).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

/// Reader that skips `#` lines.
pub fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file))
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv_reader(path)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<T>, _>>()?;
    Ok(rows)
}

/// Serializes `value` (which must be a JSON object) with a `provenance` key added.
pub fn write_json<T: Serialize>(path: &Path, prov: &Provenance, value: &T) -> Result<()> {
    let mut v = serde_json::to_value(value)?;
    match v.as_object_mut() {
        Some(obj) => {
            obj.insert("provenance".into(), serde_json::to_value(prov)?);
        }
        None => return Err(CliError::Run("JSON outputs must be objects".into())),
    }
    let text = serde_json::to_string_pretty(&v)?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// `0.15` → `"0.15"`, safe inside file names.
pub fn tag(v: f64) -> String {
    format!("{v}").replace('-', "m")
}
