use std::collections::HashMap;
use std::future::Future;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

/// A cached response. On disk: `key:`, `model:` and `created_at:` header
/// lines, a blank line, then the raw response text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub model: String,
    pub created_at: u64,
    pub value: String,
}

impl CacheEntry {
    pub fn new(key: impl Into<String>, model: impl Into<String>, value: impl Into<String>) -> Self {
        let created_at = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self { key: key.into(), model: model.into(), created_at, value: value.into() }
    }

    fn encode(&self) -> String {
        format!("key: {}\nmodel: {}\ncreated_at: {}\n\n{}", self.key, self.model, self.created_at, self.value)
    }

    fn decode(raw: &str) -> Option<Self> {
        let (header, value) = raw.split_once("\n\n")?;
        let mut key = None;
        let mut model = String::new();
        let mut created_at = 0;
        for line in header.lines() {
            match line.split_once(": ") {
                Some(("key", v)) => key = Some(v.to_string()),
                Some(("model", v)) => model = v.to_string(),
                Some(("created_at", v)) => created_at = v.parse().ok()?,
                _ => {}
            }
        }
        Some(Self { key: key?, model, created_at, value: value.to_string() })
    }
}

/// Content-addressed response store at `<root>/<first2>/<digest>` with
/// per-key single-flight.
#[derive(Debug)]
pub struct DiskCache {
    root: PathBuf,
    inflight: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

impl DiskCache {
    /// Opens (creating if needed) a cache rooted at `root`, normally `<base>/cache/llm`.
    pub fn open(root: impl Into<PathBuf>) -> io::Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root)?;
        Ok(Self { root, inflight: Mutex::new(HashMap::new()) })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        let shard = key.get(..2).unwrap_or(key);
        self.root.join(shard).join(key)
    }

    pub fn get(&self, key: &str) -> io::Result<Option<CacheEntry>> {
        match std::fs::read_to_string(self.path_for(key)) {
            Ok(raw) => Ok(CacheEntry::decode(&raw).filter(|e| e.key == key)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn put(&self, entry: &CacheEntry) -> io::Result<()> {
        let path = self.path_for(&entry.key);
        let dir = path.parent().expect("cache paths always have a shard directory");
        std::fs::create_dir_all(dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(entry.encode().as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(())
    }

    /// Number of stored entries.
    pub fn len(&self) -> io::Result<usize> {
        let mut n = 0;
        for shard in std::fs::read_dir(&self.root)? {
            let shard = shard?;
            if shard.file_type()?.is_dir() {
                n += std::fs::read_dir(shard.path())?
                    .filter_map(Result::ok)
                    .filter(|e| e.file_name().len() == 64)
                    .count();
            }
        }
        Ok(n)
    }

    pub fn is_empty(&self) -> io::Result<bool> {
        self.len().map(|n| n == 0)
    }

    /// Returns the cached value for `key`, or runs `fetch` while holding the
    /// key's in-flight lock and stores its result. The flag is `true` on a hit.
    pub async fn get_or_fetch<E, Fut>(
        &self,
        key: &str,
        model: &str,
        fetch: impl FnOnce() -> Fut,
    ) -> Result<(String, bool), E>
    where
        Fut: Future<Output = Result<String, E>>,
        E: From<io::Error>,
    {
        if let Some(hit) = self.get(key)? {
            return Ok((hit.value, true));
        }
        let gate = {
            let mut map = self.inflight.lock().expect("in-flight map poisoned");
            map.entry(key.to_string()).or_default().clone()
        };
        let result = {
            let _held = gate.lock().await;
            match self.get(key)? {
                Some(hit) => Ok((hit.value, true)),
                None => match fetch().await {
                    Ok(value) => {
                        self.put(&CacheEntry::new(key, model, value.clone()))?;
                        Ok((value, false))
                    }
                    Err(e) => Err(e),
                },
            }
        };
        let mut map = self.inflight.lock().expect("in-flight map poisoned");
        if Arc::strong_count(&gate) == 2 {
            map.remove(key);
        }
        result
    }
}
