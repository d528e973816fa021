//! Artifact writing: provenance headers and atomic replacement.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub command_line: String,
    /// SHA-256 of the canonical JSON of the parsed command, output path excluded.
    pub config_hash: String,
    pub version: String,
}

impl Provenance {
    pub fn new<C: Serialize>(argv: &[String], config: &C) -> Self {
        let canonical = serde_json::to_string(config).expect("command serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Self { command_line: shell_join(argv), config_hash, version: VERSION.to_string() }
    }

    /// `# key: value` lines for CSV artifacts.
    pub fn csv_header(&self) -> String {
        format!(
            "# tomokit {}\n# command: {}\n# config_sha256: {}\n",
            self.version, self.command_line, self.config_hash
        )
    }

    /// Insert a `provenance` key at the top level of a JSON object.
    pub fn wrap_json(&self, mut v: serde_json::Value) -> serde_json::Value {
        let p = serde_json::to_value(self).expect("provenance serializes");
        match v.as_object_mut() {
            Some(obj) => {
                obj.insert("provenance".into(), p);
                v
            }
            None => serde_json::json!({ "provenance": p, "data": v }),
        }
    }
}

fn shell_join(argv: &[String]) -> String {
    argv.iter()
        .map(|a| {
            if !a.is_empty() && a.chars().all(|c| c.is_ascii_alphanumeric() || "-_.:=,/@+".contains(c)) {
                a.clone()
            } else {
                format!("'{}'", a.replace('\'', r"'\''"))
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Write to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, contents: &str) -> CliResult<()> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}
