//! Run manifests: what was run, on which inputs, producing which bytes.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult, ExitKind};
use crate::files;

pub const MANIFEST_FORMAT: &str = "grrhdr-manifest";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileHash {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileHash {
    pub fn of(path: &Path) -> CliResult<Self> {
        Ok(Self { path: path.to_path_buf(), sha256: sha256_hex(&files::read(path)?) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub format: String,
    pub version: u32,
    pub tool_version: String,
    pub command: String,
    /// Every argument of the command, paths made absolute.
    pub params: serde_json::Value,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
    /// Derived quantities worth reading without opening the outputs.
    #[serde(default)]
    pub summary: serde_json::Value,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(bytes: &[u8]) -> CliResult<Self> {
        let m: Self =
            serde_json::from_slice(bytes).map_err(|e| CliError::new(ExitKind::Format, format!("manifest: {e}")))?;
        if m.format != MANIFEST_FORMAT || m.version != MANIFEST_VERSION {
            return Err(CliError::new(
                ExitKind::Format,
                format!("manifest format {:?} version {} not supported", m.format, m.version),
            ));
        }
        Ok(m)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Where the manifest of a run writing to `out` goes.
pub fn manifest_path(out: &Path) -> PathBuf {
    files::suffixed(out, ".manifest.json")
}

/// Maps an output recorded under `old_out` to the same file under `new_out`.
pub fn relocate(path: &Path, old_out: &Path, new_out: &Path) -> CliResult<PathBuf> {
    let (p, old) = (path.to_string_lossy(), old_out.to_string_lossy());
    let rest = p.strip_prefix(old.as_ref()).ok_or_else(|| {
        CliError::new(ExitKind::Format, format!("output {} lies outside {}", path.display(), old_out.display()))
    })?;
    Ok(files::suffixed(new_out, rest))
}
