//! Run manifests: enough to replay a command and compare its output.

use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::{Report, SCHEMA_VERSION};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub schema_version: u32,
    /// Arguments after the program name, `--manifest` removed.
    pub command: Vec<String>,
    pub ring_spec_sha256: Option<String>,
    /// `R` above the requested level and degree.
    pub precision_guard: u32,
    pub caps: Value,
    pub tool_version: String,
    pub wall_time_ms: u128,
    /// Digest of exactly what went to stdout.
    pub outputs_sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(command: Vec<String>, report: &Report, guard: u32, elapsed: Duration, stdout: &str) -> Self {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            command,
            ring_spec_sha256: report.ring_text.as_ref().map(|t| sha256_hex(t.as_bytes())),
            precision_guard: guard,
            caps: report.caps.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_ms: elapsed.as_millis(),
            outputs_sha256: sha256_hex(stdout.as_bytes()),
        }
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self).unwrap() + "\n")
    }

    pub fn read(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }

    /// Whether `stdout` is what this manifest recorded.
    pub fn matches(&self, stdout: &str) -> bool {
        sha256_hex(stdout.as_bytes()) == self.outputs_sha256
    }
}
