//! Content-addressed result cache: one JSON file per job, named by the
//! SHA-256 of the job's canonical key.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "TAUFORGE_CACHE_DIR";

/// Everything a result depends on. Thread count is deliberately absent.
#[derive(Clone, Debug, PartialEq)]
pub struct JobKey {
    pub op: String,
    /// Canonical parameter JSON (sorted symbol map).
    pub params: Value,
    /// Orders, truncations, seeds and similar knobs.
    pub orders: Value,
    /// `"exact"` or `"numeric"` etc.
    pub mode: String,
    pub version: String,
}

impl JobKey {
    pub fn new(op: &str, params: Value, orders: Value, mode: &str) -> Self {
        JobKey { op: op.into(), params, orders, mode: mode.into(), version: env!("CARGO_PKG_VERSION").into() }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "op": self.op,
            "params": self.params,
            "orders": self.orders,
            "mode": self.mode,
            "version": self.version,
        })
    }

    /// serde_json maps are ordered, so this string is canonical.
    pub fn canonical(&self) -> String {
        self.to_json().to_string()
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

pub struct Cache {
    dir: PathBuf,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl Cache {
    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// `$TAUFORGE_CACHE_DIR`, else `$XDG_CACHE_HOME/tauforge`, else
    /// `$HOME/.cache/tauforge`.
    pub fn from_env() -> Option<Self> {
        if let Some(d) = std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty()) {
            return Some(Cache::at(d));
        }
        if let Some(d) = std::env::var_os("XDG_CACHE_HOME").filter(|d| !d.is_empty()) {
            return Some(Cache::at(Path::new(&d).join("tauforge")));
        }
        std::env::var_os("HOME").map(|h| Cache::at(Path::new(&h).join(".cache").join("tauforge")))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &JobKey) -> PathBuf {
        self.dir.join(format!("{}.json", key.digest()))
    }

    /// Stored result, if present and recorded under the same key.
    pub fn get(&self, key: &JobKey) -> Option<Value> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let v: Value = serde_json::from_str(&text).ok()?;
        if v.get("key")? != &key.to_json() {
            return None;
        }
        v.get("result").cloned()
    }

    /// Write-temp-then-rename, so readers never see a partial entry.
    pub fn put(&self, key: &JobKey, result: &Value) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let n = TMP_COUNTER.fetch_add(1, Ordering::Relaxed);
        let tmp = self.dir.join(format!(".{}.{}.{}.tmp", key.digest(), std::process::id(), n));
        let body = json!({ "key": key.to_json(), "result": result }).to_string();
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(body.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.path(key))
    }

    fn entries(&self) -> Vec<PathBuf> {
        let Ok(rd) = fs::read_dir(&self.dir) else { return Vec::new() };
        let mut out: Vec<PathBuf> = rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
                name.strip_suffix(".json").is_some_and(|h| h.len() == 64 && h.bytes().all(|b| b.is_ascii_hexdigit()))
            })
            .collect();
        out.sort();
        out
    }

    pub fn stats(&self) -> Value {
        json!({ "entries": self.entries().len() })
    }

    pub fn clear(&self) -> io::Result<usize> {
        let entries = self.entries();
        for p in &entries {
            fs::remove_file(p)?;
        }
        Ok(entries.len())
    }
}
