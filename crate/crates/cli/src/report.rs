//! One JSON object per run, appended to a report file.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    /// File path, or a description of generated input.
    pub input: String,
    /// SHA-256 of the input bytes, hex.
    pub digest: String,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<String>,
    pub fuel_used: u64,
    /// Milliseconds. Excluded when comparing runs.
    pub wall_ms: f64,
}

pub fn digest(bytes: &[u8]) -> String {
    let h = Sha256::digest(bytes);
    h.iter().map(|b| format!("{b:02x}")).collect()
}

/// Measures wall time from creation.
pub struct Timer(Instant);

impl Timer {
    pub fn start() -> Timer {
        Timer(Instant::now())
    }

    pub fn ms(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1000.0
    }
}

impl RunReport {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialise")
    }
}

/// Appends reports as JSON lines.
pub fn append(path: &Path, reports: &[RunReport]) -> std::io::Result<()> {
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    for r in reports {
        writeln!(f, "{}", r.to_line())?;
    }
    Ok(())
}
