//! Content-addressed result cache under `$BGG_CACHE` (default `.bgg-cache`).

use std::fs;
use std::path::PathBuf;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::commands::Output;

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn from_env() -> Self {
        let dir = std::env::var_os("BGG_CACHE").map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".bgg-cache"));
        Cache { dir }
    }

    /// Hex SHA-256 over the engine version and every part of the job.
    pub fn key(parts: &[&[u8]]) -> String {
        let mut h = Sha256::new();
        h.update(bgg::ENGINE_VERSION.as_bytes());
        for p in parts {
            h.update((p.len() as u64).to_le_bytes());
            h.update(p);
        }
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<Output> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let doc: Value = serde_json::from_str(&text).ok()?;
        Some(Output { text: doc.get("text")?.as_str()?.to_string(), json: doc.get("json")?.clone() })
    }

    /// Best effort: a cache that cannot be written is skipped.
    pub fn put(&self, key: &str, out: &Output) {
        if fs::create_dir_all(&self.dir).is_err() {
            return;
        }
        let doc = json!({"text": out.text, "json": out.json});
        let tmp = self.dir.join(format!("{key}.{}.tmp", std::process::id()));
        if fs::write(&tmp, doc.to_string()).is_ok() && fs::rename(&tmp, self.path(key)).is_err() {
            let _ = fs::remove_file(&tmp);
        }
    }
}
