//! On-disk cache of computed polynomials.
//!
//! Layout: `<dir>/g<genus>/<kind>/<key>.json`. Each entry stores the
//! canonical JSON of the polynomial together with its SHA-256, so a damaged
//! payload is detected and recomputed rather than served.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CACHE_SCHEMA_VERSION: u32 = 1;
const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    schema_version: u32,
    genus: u32,
    kind: String,
    key: String,
    poly_json: String,
    tool_version: String,
    content_hash: String,
}

/// Result of a lookup.
#[derive(Debug)]
pub enum Lookup<T> {
    Hit(T),
    Miss,
    /// An entry exists but fails its integrity or identity checks.
    Corrupt(String),
}

#[derive(Clone, Debug)]
pub struct Cache {
    root: PathBuf,
}

fn digest(payload: &str) -> String {
    hex::encode(Sha256::digest(payload.as_bytes()))
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    /// `--cache-dir`, else `MODULI_CACHE_DIR`, else no cache.
    pub fn resolve(flag: Option<&Path>) -> Option<Cache> {
        if let Some(p) = flag {
            return Some(Cache::new(p));
        }
        std::env::var_os("MODULI_CACHE_DIR")
            .filter(|v| !v.is_empty())
            .map(Cache::new)
    }

    pub fn path(&self, genus: u32, kind: &str, key: &str) -> PathBuf {
        self.root.join(format!("g{genus}")).join(kind).join(format!("{key}.json"))
    }

    pub fn get<T: DeserializeOwned>(&self, genus: u32, kind: &str, key: &str) -> Lookup<T> {
        let path = self.path(genus, kind, key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Lookup::Miss,
            Err(e) => return Lookup::Corrupt(format!("{}: {e}", path.display())),
        };
        let entry: CacheEntry = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(e) => return Lookup::Corrupt(format!("{}: {e}", path.display())),
        };
        if entry.schema_version != CACHE_SCHEMA_VERSION
            || entry.genus != genus
            || entry.kind != kind
            || entry.key != key
        {
            return Lookup::Corrupt(format!("{}: entry does not match its location", path.display()));
        }
        if digest(&entry.poly_json) != entry.content_hash {
            return Lookup::Corrupt(format!("{}: hash mismatch", path.display()));
        }
        match serde_json::from_str(&entry.poly_json) {
            Ok(v) => Lookup::Hit(v),
            Err(e) => Lookup::Corrupt(format!("{}: {e}", path.display())),
        }
    }

    /// Writes through a temporary file in the target directory and renames
    /// it into place.
    pub fn put<T: Serialize>(&self, genus: u32, kind: &str, key: &str, value: &T) -> Result<()> {
        let path = self.path(genus, kind, key);
        let dir = path.parent().expect("cache paths have a parent");
        fs::create_dir_all(dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
        let poly_json = serde_json::to_string(value)?;
        let entry = CacheEntry {
            schema_version: CACHE_SCHEMA_VERSION,
            genus,
            kind: kind.to_string(),
            key: key.to_string(),
            content_hash: digest(&poly_json),
            poly_json,
            tool_version: TOOL_VERSION.to_string(),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(serde_json::to_string_pretty(&entry)?.as_bytes())?;
        tmp.persist(&path)
            .with_context(|| format!("writing cache entry {}", path.display()))?;
        Ok(())
    }
}
