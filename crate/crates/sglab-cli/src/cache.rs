//! Content-addressed result cache.
//!
//! Entries live under `<root>/<kind>/<hash>.json` where the hash covers the
//! kind, the cache format version, and the canonicalized parameters. Each
//! entry embeds a checksum of its payload; a corrupted entry is treated as a
//! miss (with a warning) and recomputed. Bumping [`CACHE_VERSION`] changes
//! every key, so stale entries are simply never looked up again.

use std::cell::RefCell;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const CACHE_VERSION: &str = "1";

/// Cache traffic record, reproduced verbatim in the run manifest.
#[derive(Clone, Debug, Serialize)]
pub struct CacheEvent {
    pub kind: String,
    pub key: String,
    pub hit: bool,
    pub path: String,
}

pub struct Cache {
    root: PathBuf,
    version: String,
    log: RefCell<Vec<CacheEvent>>,
}

fn sha256_hex(data: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data);
    hex::encode(hasher.finalize())
}

impl Cache {
    pub fn new(root: &Path) -> Cache {
        Cache::with_version(root, CACHE_VERSION)
    }

    pub fn with_version(root: &Path, version: &str) -> Cache {
        Cache { root: root.to_path_buf(), version: version.to_string(), log: RefCell::new(Vec::new()) }
    }

    pub fn key(&self, kind: &str, params: &Value) -> String {
        sha256_hex(format!("{kind}|{}|{params}", self.version).as_bytes())
    }

    fn entry_path(&self, kind: &str, key: &str) -> PathBuf {
        self.root.join(kind).join(format!("{key}.json"))
    }

    /// Consumed-entry log for the manifest (every get and put, in order).
    pub fn events(&self) -> Vec<CacheEvent> {
        self.log.borrow().clone()
    }

    pub fn get(&self, kind: &str, params: &Value) -> Option<Value> {
        let key = self.key(kind, params);
        let path = self.entry_path(kind, &key);
        let found = fs::read_to_string(&path).ok().and_then(|text| {
            let entry: Value = serde_json::from_str(&text).ok()?;
            let payload = entry.get("payload")?;
            let checksum = entry.get("checksum")?.as_str()?;
            if sha256_hex(payload.to_string().as_bytes()) != checksum {
                eprintln!("warning: checksum mismatch in cache entry {}, recomputing", path.display());
                return None;
            }
            Some(payload.clone())
        });
        self.log.borrow_mut().push(CacheEvent {
            kind: kind.to_string(),
            key,
            hit: found.is_some(),
            path: path.display().to_string(),
        });
        found
    }

    pub fn put(&self, kind: &str, params: &Value, payload: &Value) -> Result<PathBuf> {
        let key = self.key(kind, params);
        let path = self.entry_path(kind, &key);
        fs::create_dir_all(path.parent().unwrap())
            .with_context(|| format!("creating {}", path.parent().unwrap().display()))?;
        let entry = serde_json::json!({
            "kind": kind,
            "version": self.version,
            "params": params,
            "checksum": sha256_hex(payload.to_string().as_bytes()),
            "payload": payload,
        });
        fs::write(&path, serde_json::to_string_pretty(&entry)?)
            .with_context(|| format!("writing {}", path.display()))?;
        self.log.borrow_mut().push(CacheEvent {
            kind: kind.to_string(),
            key,
            hit: false,
            path: path.display().to_string(),
        });
        Ok(path)
    }

    /// Cached computation: returns the stored payload or computes, stores,
    /// and returns it.
    pub fn get_or(
        &self,
        kind: &str,
        params: &Value,
        compute: impl FnOnce() -> Result<Value>,
    ) -> Result<Value> {
        if let Some(hit) = self.get(kind, params) {
            return Ok(hit);
        }
        let payload = compute()?;
        self.put(kind, params, &payload)?;
        Ok(payload)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn round_trip_is_byte_identical() {
        let dir = tempdir();
        let cache = Cache::new(&dir);
        let params = json!({"radius": 4, "genus": 2});
        let payload = json!({"layers": [1, 8, 48]});
        let path = cache.put("ball", &params, &payload).unwrap();
        let first = fs::read(&path).unwrap();
        assert_eq!(cache.get("ball", &params).unwrap(), payload);
        assert_eq!(fs::read(&path).unwrap(), first);
        cleanup(dir);
    }

    #[test]
    fn corruption_is_detected() {
        let dir = tempdir();
        let cache = Cache::new(&dir);
        let params = json!({"n": 3});
        let path = cache.put("phi", &params, &json!([1, 2, 3])).unwrap();
        let mangled = fs::read_to_string(&path).unwrap().replace("[1,2,3]", "[1,2,4]");
        let mut entry: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        entry["payload"] = json!([9]);
        fs::write(&path, entry.to_string()).unwrap();
        drop(mangled);
        assert!(cache.get("phi", &params).is_none());
        cleanup(dir);
    }

    #[test]
    fn version_bump_forces_recompute() {
        let dir = tempdir();
        let params = json!({"n": 5});
        Cache::with_version(&dir, "1").put("projector", &params, &json!("old")).unwrap();
        let bumped = Cache::with_version(&dir, "2");
        assert!(bumped.get("projector", &params).is_none());
        let mut computed = false;
        let got = bumped
            .get_or("projector", &params, || {
                computed = true;
                Ok(json!("new"))
            })
            .unwrap();
        assert!(computed);
        assert_eq!(got, json!("new"));
        cleanup(dir);
    }

    fn tempdir() -> PathBuf {
        let dir = std::env::temp_dir().join(format!("sglab-cache-test-{}", std::process::id()))
            .join(format!("{:x}", rand::random::<u64>()));
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    fn cleanup(dir: PathBuf) {
        let _ = fs::remove_dir_all(dir);
    }
}
