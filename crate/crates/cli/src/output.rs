//! CSV tables, `summary.json` and `manifest.json`.

use crate::config::SCHEMA_VERSION;
use crate::experiments::{Outcome, Table, Verdict};
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Serialize)]
struct Summary<'a> {
    schema_version: u32,
    kind: &'a str,
    name: Option<&'a str>,
    pass: bool,
    assertions: &'a [Verdict],
    metrics: &'a Map<String, Value>,
    warnings: &'a [String],
}

#[derive(Debug, Serialize)]
struct FileDigest {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    kind: &'a str,
    name: Option<&'a str>,
    config_hash: &'a str,
    code_version: &'a str,
    started_unix: u64,
    finished_unix: u64,
    threads: usize,
    files: Vec<FileDigest>,
    verdicts: &'a [Verdict],
    pass: bool,
}

/// Run metadata that does not come from the experiment itself.
#[derive(Debug, Clone)]
pub struct RunInfo<'a> {
    pub kind: &'a str,
    pub name: Option<&'a str>,
    pub config_hash: &'a str,
    pub started: SystemTime,
    pub threads: usize,
}

fn unix(t: SystemTime) -> u64 {
    t.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn table_bytes(table: &Table) -> io::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

/// Writes every artifact into `dir` and returns the paths written.
pub fn write_all(dir: &Path, outcome: &Outcome, info: &RunInfo) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut files = Vec::new();
    let mut emit = |file: String, bytes: Vec<u8>| -> io::Result<()> {
        let path = dir.join(&file);
        std::fs::write(&path, &bytes)?;
        files.push(FileDigest {
            path: file,
            sha256: sha256_hex(&bytes),
        });
        written.push(path);
        Ok(())
    };
    for table in &outcome.tables {
        emit(format!("{}.csv", table.name), table_bytes(table)?)?;
    }
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        kind: info.kind,
        name: info.name,
        pass: outcome.pass(),
        assertions: &outcome.assertions,
        metrics: &outcome.metrics,
        warnings: &outcome.warnings,
    };
    let mut json = serde_json::to_vec_pretty(&summary)?;
    json.push(b'\n');
    emit("summary.json".into(), json)?;

    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        kind: info.kind,
        name: info.name,
        config_hash: info.config_hash,
        code_version: env!("CARGO_PKG_VERSION"),
        started_unix: unix(info.started),
        finished_unix: unix(SystemTime::now()),
        threads: info.threads,
        files,
        verdicts: &outcome.verdicts,
        pass: outcome.pass(),
    };
    let mut json = serde_json::to_vec_pretty(&manifest)?;
    json.push(b'\n');
    let path = dir.join("manifest.json");
    std::fs::write(&path, json)?;
    written.push(path);
    Ok(written)
}
