//! `manifest.json`: every written file with its size and SHA-256.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, ToolError};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub seed: u64,
    pub files: Vec<ManifestEntry>,
}

pub fn sha256_file(path: &Path) -> Result<(u64, String)> {
    let data = std::fs::read(path).map_err(|e| ToolError::io(path, e))?;
    let digest = Sha256::digest(&data);
    Ok((data.len() as u64, digest.iter().map(|b| format!("{b:02x}")).collect()))
}

/// Hashes `files` (paths under `root`) and writes the manifest next to
/// them. Entries are sorted by path.
pub fn write_manifest(root: &Path, command: &str, seed: u64, files: &[std::path::PathBuf]) -> Result<Manifest> {
    let mut entries = Vec::with_capacity(files.len());
    for f in files {
        let rel = f.strip_prefix(root).unwrap_or(f);
        let path = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        let (bytes, sha256) = sha256_file(f)?;
        entries.push(ManifestEntry { path, bytes, sha256 });
    }
    entries.sort_by(|a, b| a.path.cmp(&b.path));
    entries.dedup_by(|a, b| a.path == b.path);
    let manifest = Manifest { command: command.into(), seed, files: entries };
    let out = root.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| ToolError::file(&out, e))?;
    std::fs::write(&out, json + "\n").map_err(|e| ToolError::io(&out, e))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("a").join("abc.txt");
        std::fs::create_dir_all(f.parent().unwrap()).unwrap();
        std::fs::write(&f, b"abc").unwrap();
        let m = write_manifest(dir.path(), "test", 0, &[f]).unwrap();
        assert_eq!(m.files[0].path, "a/abc.txt");
        assert_eq!(m.files[0].bytes, 3);
        assert_eq!(m.files[0].sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
