//! Atomic file output with a config-hash comment line.

use freeconv::{Error, Result};
use std::path::{Path, PathBuf};

/// Write `body` to `dir/name` atomically (temp file + rename), prefixed by
/// the `# config_hash=...` comment line.
pub fn write_csv(dir: &Path, name: &str, hash: &str, body: &str) -> Result<PathBuf> {
    let payload = format!("# config_hash={hash}\n{body}");
    write_atomic(dir, name, &payload)
}

/// Write a JSON document atomically (the hash lives inside the document).
pub fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<PathBuf> {
    let payload = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    write_atomic(dir, name, &payload)
}

fn write_atomic(dir: &Path, name: &str, payload: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Config(format!("cannot create '{}': {e}", dir.display())))?;
    let path = dir.join(name);
    let tmp = dir.join(format!("{name}.tmp"));
    std::fs::write(&tmp, payload)
        .map_err(|e| Error::Config(format!("cannot write '{}': {e}", tmp.display())))?;
    std::fs::rename(&tmp, &path)
        .map_err(|e| Error::Config(format!("cannot move into place '{}': {e}", path.display())))?;
    Ok(path)
}
