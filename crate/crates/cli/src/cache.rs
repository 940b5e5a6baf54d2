//! Append-only JSON-lines results cache.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crystalk_core::{IntMatrix, StructureInvariants};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub command: String,
    pub n: usize,
    pub invariants: StructureInvariants,
    pub matrix_sha256: String,
}

impl CacheKey {
    pub fn new(command: &str, matrix: &IntMatrix, invariants: StructureInvariants) -> Self {
        let json = serde_json::to_string(matrix).expect("matrix serializes");
        CacheKey {
            command: command.to_string(),
            n: matrix.rows(),
            invariants,
            matrix_sha256: hex::encode(Sha256::digest(json.as_bytes())),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Record {
    key: CacheKey,
    result: Value,
}

pub struct Cache {
    path: PathBuf,
}

impl Cache {
    pub fn new(path: &Path) -> Self {
        Cache { path: path.to_path_buf() }
    }

    /// Last stored result for `key`. Lines that do not parse are ignored.
    pub fn lookup(&self, key: &CacheKey) -> Result<Option<Value>, CliError> {
        let file = match std::fs::File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(CliError::Input(format!("cannot read cache {}: {e}", self.path.display()))),
        };
        let mut found = None;
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| CliError::Input(format!("cannot read cache: {e}")))?;
            if let Ok(rec) = serde_json::from_str::<Record>(&line) {
                if rec.key == *key {
                    found = Some(rec.result);
                }
            }
        }
        Ok(found)
    }

    pub fn append(&self, key: CacheKey, result: Value) -> Result<(), CliError> {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| CliError::Input(format!("cannot open cache {}: {e}", self.path.display())))?;
        let line = serde_json::to_string(&Record { key, result }).expect("record serializes");
        writeln!(file, "{line}").map_err(|e| CliError::Input(format!("cannot write cache: {e}")))
    }
}
