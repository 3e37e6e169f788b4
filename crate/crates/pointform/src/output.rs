//! Output files: every artifact carries the tool version and config hash, and
//! is written to a temp file in the target directory before being renamed.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

pub const TOOL: &str = "pointform";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Identifies the producing run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stamp {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
}

impl Stamp {
    pub fn new(config_sha256: String) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            config_sha256,
        }
    }
}

/// A named file and its bytes, not yet on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// `{tool, version, config_sha256, command, ...body}` as pretty JSON.
pub fn json_report(stamp: &Stamp, command: &str, body: Value) -> Value {
    let mut map = Map::new();
    map.insert("tool".into(), Value::from(stamp.tool));
    map.insert("version".into(), Value::from(stamp.version));
    map.insert("config_sha256".into(), Value::from(stamp.config_sha256.clone()));
    map.insert("command".into(), Value::from(command));
    if let Value::Object(body) = body {
        map.extend(body);
    }
    Value::Object(map)
}

pub fn json_artifact(name: &str, report: &Value) -> Artifact {
    let mut bytes = serde_json::to_vec_pretty(report).expect("report serializes");
    bytes.push(b'\n');
    Artifact {
        name: name.into(),
        bytes,
    }
}

/// CSV with `#` comment lines for the stamp, then the header and rows.
pub fn csv_artifact<R: Serialize>(name: &str, stamp: &Stamp, header: &[&str], rows: &[R]) -> Result<Artifact, CliError> {
    let mut bytes = Vec::new();
    writeln!(bytes, "# {} {}", stamp.tool, stamp.version)?;
    writeln!(bytes, "# config_sha256 {}", stamp.config_sha256)?;
    {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut bytes);
        w.write_record(header).map_err(csv_err)?;
        for r in rows {
            w.serialize(r).map_err(csv_err)?;
        }
        w.flush()?;
    }
    Ok(Artifact {
        name: name.into(),
        bytes,
    })
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

/// Writes through a temp file in `dir` and renames it into place.
pub fn write_atomic(dir: &Path, artifact: &Artifact) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let target = dir.join(&artifact.name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(&artifact.bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(&target).map_err(|e| CliError::Io(e.error))?;
    Ok(target)
}

/// Reads back the data rows of a stamped CSV file, skipping comments.
pub fn read_csv_rows(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let text = std::fs::read_to_string(path)?;
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut r = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let header = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|x| x.iter().map(String::from).collect()).map_err(csv_err))
        .collect::<Result<_, _>>()?;
    Ok((header, rows))
}
