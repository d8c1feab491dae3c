//! Content-addressed result cache: one JSON file per (command, params) key.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::Value as Json;
use sha2::{Digest, Sha256};

use crate::result::ExperimentResult;

pub const CACHE_ENV: &str = "HOMSTAB_CACHE_DIR";

/// `--cache-dir`, then `HOMSTAB_CACHE_DIR`, then `$XDG_CACHE_HOME/homstab`,
/// then `$HOME/.cache/homstab`.
pub fn resolve_cache_dir(flag: Option<&Path>) -> Option<PathBuf> {
    if let Some(p) = flag {
        return Some(p.to_path_buf());
    }
    let non_empty = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty());
    if let Some(p) = non_empty(CACHE_ENV) {
        return Some(PathBuf::from(p));
    }
    if let Some(p) = non_empty("XDG_CACHE_HOME") {
        return Some(PathBuf::from(p).join("homstab"));
    }
    non_empty("HOME").map(|h| PathBuf::from(h).join(".cache").join("homstab"))
}

/// Hex SHA-256 of the command, the canonical params JSON and the crate version.
pub fn cache_key(command: &str, params: &BTreeMap<String, Json>) -> String {
    let canonical = serde_json::to_string(params).expect("plain data serialises");
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update([0]);
    h.update(canonical.as_bytes());
    h.update([0]);
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    hex::encode(h.finalize())
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: PathBuf) -> Self {
        Cache { dir }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A stored result, if present and readable; corrupt entries are ignored.
    pub fn get(&self, key: &str) -> Option<ExperimentResult> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        ExperimentResult::from_json(&text).ok()
    }

    pub fn put(&self, key: &str, result: &ExperimentResult) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!("{key}.json.tmp{}", std::process::id()));
        fs::write(&tmp, result.to_json())?;
        fs::rename(tmp, self.path(key))
    }
}
