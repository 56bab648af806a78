//! Payload rendering, output files and run manifests.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use witnesskit::{CMatrix, C64};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Rendered command output.
pub enum Payload {
    Json(Value),
    Csv(String),
}

impl Payload {
    pub fn render(&self) -> CliResult<String> {
        match self {
            Payload::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Payload::Csv(s) => Ok(s.clone()),
        }
    }
}

/// Serializes rows with a header line.
pub fn csv_rows<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

/// Row-major list of rows of `[re, im]` pairs.
pub fn matrix_to_json(m: &CMatrix) -> Value {
    Value::Array(
        m.row_iter()
            .map(|row| Value::Array(row.iter().map(|z| json!([z.re, z.im])).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(v: &Value) -> Result<CMatrix, String> {
    let rows = v.as_array().ok_or("matrix is not an array")?;
    let n = rows.len();
    let mut m = CMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let entries = row.as_array().filter(|r| r.len() == n).ok_or("matrix is not square")?;
        for (j, z) in entries.iter().enumerate() {
            let pair = z.as_array().filter(|p| p.len() == 2).ok_or("entry is not [re, im]")?;
            let re = pair[0].as_f64().ok_or("re is not a number")?;
            let im = pair[1].as_f64().ok_or("im is not a number")?;
            m[(i, j)] = C64::new(re, im);
        }
    }
    Ok(m)
}

#[derive(Serialize)]
struct EntryRow {
    row: usize,
    col: usize,
    re: f64,
    im: f64,
}

pub fn matrix_csv(m: &CMatrix) -> CliResult<String> {
    let rows: Vec<EntryRow> = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| EntryRow {
            row: i,
            col: j,
            re: m[(i, j)].re,
            im: m[(i, j)].im,
        })
        .collect();
    csv_rows(&rows)
}

#[derive(Debug, Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to rerun a command and check its output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub seed: u64,
    pub version: String,
    pub timestamp: String,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Writes the payload to `out` (plus a manifest next to it) or to stdout.
pub fn emit(payload: &Payload, out: Option<&Path>, command: &str, seed: u64) -> CliResult<()> {
    let text = payload.render()?;
    let Some(out) = out else {
        print!("{text}");
        return Ok(());
    };
    std::fs::write(out, &text).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let manifest = RunManifest {
        command: command.to_string(),
        argv: std::env::args().collect(),
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        outputs: vec![OutputDigest {
            path: out.display().to_string(),
            sha256: sha256_hex(text.as_bytes()),
        }],
    };
    let mpath = manifest_path(out);
    let mtext = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    std::fs::write(&mpath, mtext).map_err(|e| CliError::Io(format!("{}: {e}", mpath.display())))?;
    Ok(())
}
