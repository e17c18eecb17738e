//! CSV tables and run manifests.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv(path: impl AsRef<Path>, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Dimension(format!("CSV row has {} cells for {} columns", row.len(), header.len())));
        }
        w.write_record(row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    fs::write(path, bytes)?;
    Ok(())
}

/// Header and rows of a CSV file.
pub fn read_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Format(e.to_string()))?;
    let header = r.headers().map_err(|e| Error::Format(e.to_string()))?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| {
            rec.map(|rec| rec.iter().map(String::from).collect())
                .map_err(|e| Error::Format(e.to_string()))
        })
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

/// Hex SHA-256 of the compact JSON encoding of `cfg`.
pub fn config_hash<T: Serialize>(cfg: &T) -> Result<String> {
    let digest = Sha256::digest(serde_json::to_vec(cfg)?);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new<T: Serialize>(command: &str, cfg: &T, seed: u64, outputs: Vec<String>) -> Result<Self> {
        Ok(Self {
            tool: "oamnet".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_hash: config_hash(cfg)?,
            seed,
            outputs,
        })
    }

    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        fs::write(dir.as_ref().join("manifest.json"), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn read(dir: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(dir.as_ref().join("manifest.json"))?)?)
    }
}
