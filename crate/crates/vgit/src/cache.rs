//! Content-addressed on-disk store for fundamental sets and reports.
//! Entries are keyed by a SHA-256 over the tool version and the request,
//! carry a checksum line, and are written through a temporary file that is
//! renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::report::TOOL_VERSION;

pub const CACHE_ENV: &str = "VGIT_CACHE_DIR";

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit(String),
    Miss,
    /// unreadable or checksum mismatch; the reason is for a warning
    Corrupt(String),
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// `$VGIT_CACHE_DIR`, else `$HOME/.cache/vgit`.
    pub fn from_env() -> Option<Self> {
        if let Some(d) = std::env::var_os(CACHE_ENV) {
            return Some(Cache::new(d));
        }
        std::env::var_os("HOME").map(|h| Cache::new(Path::new(&h).join(".cache").join("vgit")))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Key for a request; the tool version is always part of it.
    pub fn key(parts: &[&str]) -> String {
        Self::key_for(TOOL_VERSION, parts)
    }

    pub fn key_for(version: &str, parts: &[&str]) -> String {
        let mut h = Sha256::new();
        h.update(version.as_bytes());
        for p in parts {
            h.update(b"\x1f");
            h.update(p.as_bytes());
        }
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.entry"))
    }

    pub fn get(&self, key: &str) -> Result<Lookup> {
        let path = self.path(key);
        let raw = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Lookup::Miss),
            Err(e) => return Err(e.into()),
        };
        let Ok(text) = String::from_utf8(raw) else {
            return Ok(Lookup::Corrupt(format!("{} is not UTF-8", path.display())));
        };
        let Some((sum, payload)) = text.split_once('\n') else {
            return Ok(Lookup::Corrupt(format!("{} has no checksum line", path.display())));
        };
        if hex::encode(Sha256::digest(payload.as_bytes())) != sum {
            return Ok(Lookup::Corrupt(format!("{} fails its checksum", path.display())));
        }
        Ok(Lookup::Hit(payload.to_string()))
    }

    pub fn put(&self, key: &str, payload: &str) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        writeln!(tmp, "{}", hex::encode(Sha256::digest(payload.as_bytes())))?;
        tmp.write_all(payload.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }
}
