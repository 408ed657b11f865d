//! Deterministic file emission and content hashing.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Format;
use crate::error::{CliError, Result};

/// Shortest decimal that round-trips to the same `f64`.
pub fn float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        serde_json::Number::from_f64(x)
            .expect("finite")
            .to_string()
    }
}

/// Column-oriented numeric table; `None` marks a missing value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.map(float).unwrap_or_default()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn render(&self, format: Format) -> Result<(String, &'static str)> {
        Ok(match format {
            Format::Csv => (self.to_csv(), "trajectory.csv"),
            Format::Json => (self.to_json()?, "trajectory.json"),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash over the `(name, digest)` list, independent of where files live.
pub fn content_hash(files: &[OutputFile]) -> String {
    let mut text = String::new();
    for f in files {
        let _ = writeln!(text, "{} {}", f.file, f.sha256);
    }
    sha256_hex(text.as_bytes())
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<OutputFile> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    Ok(OutputFile {
        file: name.to_string(),
        sha256: sha256_hex(contents.as_bytes()),
        bytes: contents.len(),
    })
}

pub fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))
}
