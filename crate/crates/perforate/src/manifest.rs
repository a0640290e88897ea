//! Study manifests: every emitted file with its SHA-256.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileEntry {
    /// Path relative to the manifest directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub kind: String,
    pub study: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: u32,
    pub code_version: String,
    pub rng_scheme: String,
    pub inputs_hash: String,
    pub seed: u64,
    /// Wall-clock seconds per study; the only non-reproducible field.
    pub timings: BTreeMap<String, f64>,
    pub files: Vec<FileEntry>,
}

impl Manifest {
    pub fn new(inputs_hash: String, seed: u64) -> Self {
        Manifest {
            version: MANIFEST_VERSION,
            code_version: env!("CARGO_PKG_VERSION").into(),
            rng_scheme: perforate_core::process::RNG_SCHEME.into(),
            inputs_hash,
            seed,
            timings: BTreeMap::new(),
            files: Vec::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let m: Manifest = serde_json::from_slice(&bytes).map_err(|e| Error::json(path.display().to_string(), e))?;
        if m.version != MANIFEST_VERSION {
            return Err(Error::Format(format!("manifest version {} is not {MANIFEST_VERSION}", m.version)));
        }
        Ok(m)
    }

    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        let mut bytes = serde_json::to_vec_pretty(self).expect("manifest serializes");
        bytes.push(b'\n');
        crate::write_file(&path, &bytes)?;
        Ok(path)
    }

    /// Entries whose path, kind or study equals `selector`.
    pub fn select(&self, selector: &str) -> Vec<&FileEntry> {
        self.files
            .iter()
            .filter(|f| f.path == selector || f.kind == selector || f.study == selector)
            .collect()
    }

    /// Re-hashes every listed file under `dir`.
    pub fn verify(&self, dir: &Path) -> Result<()> {
        let mut problems = Vec::new();
        for f in &self.files {
            match fs::read(dir.join(&f.path)) {
                Ok(bytes) if sha256_hex(&bytes) == f.sha256 => {}
                Ok(_) => problems.push(format!("{} changed", f.path)),
                Err(_) => problems.push(format!("{} missing", f.path)),
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Integrity(problems.join(", ")))
        }
    }

    pub fn read_entry(&self, dir: &Path, entry: &FileEntry) -> Result<Vec<u8>> {
        let path = dir.join(&entry.path);
        let bytes = fs::read(&path).map_err(|_| Error::MissingArtifact(entry.path.clone()))?;
        if sha256_hex(&bytes) != entry.sha256 {
            return Err(Error::Integrity(format!("{} changed", entry.path)));
        }
        Ok(bytes)
    }
}

/// Writes files below a root directory and records them in a manifest.
#[derive(Debug)]
pub struct ArtifactWriter {
    root: PathBuf,
    pub manifest: Manifest,
}

impl ArtifactWriter {
    pub fn new(root: impl Into<PathBuf>, manifest: Manifest) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        Ok(ArtifactWriter { root, manifest })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, rel: &str, kind: &str, study: &str, bytes: &[u8]) -> Result<()> {
        crate::write_file(&self.root.join(rel), bytes)?;
        let entry = FileEntry {
            path: rel.into(),
            sha256: sha256_hex(bytes),
            kind: kind.into(),
            study: study.into(),
        };
        match self.manifest.files.iter_mut().find(|f| f.path == rel) {
            Some(old) => *old = entry,
            None => self.manifest.files.push(entry),
        }
        Ok(())
    }

    pub fn finish(self) -> Result<(PathBuf, Manifest)> {
        let path = self.manifest.save(&self.root)?;
        Ok((path, self.manifest))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn deletion_and_edits_are_detected() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = ArtifactWriter::new(dir.path(), Manifest::new("x".into(), 1)).unwrap();
        w.write("a.txt", "note", "sample", b"one").unwrap();
        w.write("sub/b.txt", "note", "sample", b"two").unwrap();
        let (path, m) = w.finish().unwrap();
        assert_eq!(Manifest::load(&path).unwrap(), m);
        m.verify(dir.path()).unwrap();
        fs::write(dir.path().join("a.txt"), b"uno").unwrap();
        assert!(matches!(m.verify(dir.path()), Err(Error::Integrity(_))));
        fs::write(dir.path().join("a.txt"), b"one").unwrap();
        fs::remove_file(dir.path().join("sub/b.txt")).unwrap();
        assert!(matches!(m.verify(dir.path()), Err(Error::Integrity(_))));
    }
}
