use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

pub const TOOL: &str = concat!("coarsegrain ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
}

/// A rendered artifact: a default file name and its complete text.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub kind: crate::spec::ArtifactKind,
    /// Set for artifacts written once per partition.
    pub partition: Option<String>,
    pub file: String,
    pub format: Format,
    pub text: String,
}

/// Provenance carried by every artifact.
#[derive(Debug, Clone)]
pub struct Header {
    pub digest: String,
}

impl Header {
    /// `{"tool", "spec_sha256", key: payload}` with sorted keys.
    pub fn json<T: Serialize>(&self, key: &str, payload: &T) -> String {
        let mut map = Map::new();
        map.insert("tool".into(), Value::String(TOOL.into()));
        map.insert("spec_sha256".into(), Value::String(self.digest.clone()));
        map.insert(
            key.into(),
            serde_json::to_value(payload).expect("payload serialises"),
        );
        let mut text = serde_json::to_string_pretty(&Value::Object(map)).expect("json value");
        text.push('\n');
        text
    }

    pub fn csv(&self, body: &str) -> String {
        format!("# {TOOL} spec_sha256={}\n{body}", self.digest)
    }

    pub fn dot(&self, body: &str) -> String {
        format!("// {TOOL} spec_sha256={}\n{body}", self.digest)
    }
}

/// Write `text` to `path` through a temporary file in the same directory
/// followed by a rename, so readers never observe a partial artifact.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir, e))?;
    tmp.write_all(text.as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
