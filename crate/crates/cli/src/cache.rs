//! Content-addressed store for generator files.
//!
//! Entries are named by a hash of the architecture's canonical certificate
//! and hold generators in canonical coordinates (point `i` is the vertex at
//! canonical position `i`), so any isomorphic copy of the architecture, under
//! any file name or PE numbering, reuses them.

use std::path::{Path, PathBuf};

use log::{info, warn};
use sha2::{Digest, Sha256};
use symmap::archgraph::CanonicalForm;

use crate::files::GeneratorFile;

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: &Path) -> Self {
        Cache { dir: dir.to_path_buf() }
    }

    fn path(&self, kind: &str, seeded: bool, certificate: &[u8]) -> PathBuf {
        let digest = hex::encode(Sha256::digest(certificate));
        let tag = if seeded { "-seeded" } else { "" };
        self.dir.join(format!("{kind}{tag}-{digest}.json"))
    }

    /// The stored entry, if its certificate matches exactly.
    pub fn load(&self, kind: &str, seeded: bool, certificate: &[u8]) -> Option<GeneratorFile> {
        let path = self.path(kind, seeded, certificate);
        let text = std::fs::read_to_string(&path).ok()?;
        match serde_json::from_str::<GeneratorFile>(&text) {
            Ok(f) if f.certificate == hex::encode(certificate) && f.kind == kind => {
                info!("cache hit: {}", path.display());
                Some(f)
            }
            Ok(_) => {
                warn!("ignoring cache entry with a different certificate: {}", path.display());
                None
            }
            Err(e) => {
                warn!("ignoring unreadable cache entry {}: {e}", path.display());
                None
            }
        }
    }

    pub fn store(&self, file: &GeneratorFile, seeded: bool, certificate: &[u8]) -> std::io::Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let path = self.path(&file.kind, seeded, certificate);
        let text = serde_json::to_string_pretty(file).expect("serializable");
        std::fs::write(&path, text + "\n")?;
        info!("cache store: {}", path.display());
        Ok(())
    }
}

/// Renames points from vertex numbering to canonical positions.
pub fn to_canonical(form: &CanonicalForm) -> Vec<u32> {
    form.positions()
}

/// Renames points from canonical positions back to vertex numbering.
pub fn from_canonical(form: &CanonicalForm) -> Vec<u32> {
    form.labeling.clone()
}
