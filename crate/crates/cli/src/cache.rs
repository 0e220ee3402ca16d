//! On-disk cache: one directory per p, one JSON file per (kind, bound).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Bumped whenever a cached type changes shape; older files are rebuilt.
pub const CACHE_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "QUATLIFT_CACHE";

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    version: u32,
    p: u64,
    kind: String,
    bound: u64,
    data: T,
}

#[derive(Clone, Debug)]
pub struct Cache {
    root: Option<PathBuf>,
}

impl Cache {
    /// `--cache-dir`, else the environment variable, else no caching.
    pub fn new(dir: Option<PathBuf>) -> Cache {
        let root = dir.or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
        Cache { root }
    }

    pub fn path(&self, p: u64, kind: &str, bound: u64) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join(format!("p{p}")).join(format!("{kind}-{bound}.json")))
    }

    /// Cached value for the key, or `build()` written back. Unreadable or stale
    /// files are rebuilt without complaint.
    pub fn get_or<T, F>(&self, p: u64, kind: &str, bound: u64, build: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        let Some(path) = self.path(p, kind, bound) else { return build() };
        if let Some(v) = read::<T>(&path, p, kind, bound) {
            return Ok(v);
        }
        let data = build()?;
        let env = Envelope { version: CACHE_VERSION, p, kind: kind.to_string(), bound, data };
        let bytes = serde_json::to_vec(&env)?;
        write_atomic(&path, &bytes).with_context(|| format!("writing cache file {}", path.display()))?;
        Ok(env.data)
    }
}

fn read<T: DeserializeOwned>(path: &Path, p: u64, kind: &str, bound: u64) -> Option<T> {
    let bytes = fs::read(path).ok()?;
    let env: Envelope<T> = serde_json::from_slice(&bytes).ok()?;
    (env.version == CACHE_VERSION && env.p == p && env.kind == kind && env.bound == bound).then_some(env.data)
}

/// Write through a temporary file in the target directory and rename it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)?;
    Ok(())
}
