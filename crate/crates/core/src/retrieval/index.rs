use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RetrievalError;
use crate::corpus::ProcessedCorpus;

pub const INDEX_CACHE_FILE: &str = "index.cache";
const MAGIC: &[u8; 8] = b"TSIDX\x00\x00\x01";

/// term -> time index -> ascending document ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvertedIndex {
    pub postings: HashMap<String, BTreeMap<usize, Vec<String>>>,
    pub built_from: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Built,
}

impl InvertedIndex {
    pub fn build(corpus: &ProcessedCorpus) -> Self {
        let mut sets: HashMap<&str, BTreeMap<usize, BTreeSet<&str>>> = HashMap::new();
        for doc in &corpus.documents {
            for tok in &doc.tokens {
                sets.entry(tok.as_str())
                    .or_default()
                    .entry(doc.time_index)
                    .or_default()
                    .insert(doc.id.as_str());
            }
        }
        let postings = sets
            .into_iter()
            .map(|(term, by_time)| {
                let by_time = by_time
                    .into_iter()
                    .map(|(t, ids)| (t, ids.into_iter().map(str::to_string).collect()))
                    .collect();
                (term.to_string(), by_time)
            })
            .collect();
        Self {
            postings,
            built_from: corpus.checksum(),
        }
    }

    pub fn posting(&self, term: &str, t: usize) -> &[String] {
        self.postings
            .get(term)
            .and_then(|m| m.get(&t))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Cache layout: magic, 64-byte hex checksum of the source corpus, bincode payload.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(self.built_from.as_bytes());
        // HashMap order is random; sort for byte-stable output
        let sorted: BTreeMap<&String, &BTreeMap<usize, Vec<String>>> = self.postings.iter().collect();
        bincode::serialize_into(&mut out, &sorted).expect("in-memory serialization");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, RetrievalError> {
        let corrupt = |m: &str| RetrievalError::CorruptCache(m.to_string());
        if bytes.len() < MAGIC.len() + 64 || &bytes[..MAGIC.len()] != MAGIC {
            return Err(corrupt("bad header"));
        }
        let checksum = std::str::from_utf8(&bytes[MAGIC.len()..MAGIC.len() + 64])
            .map_err(|_| corrupt("bad checksum header"))?
            .to_string();
        let postings: HashMap<String, BTreeMap<usize, Vec<String>>> =
            bincode::deserialize(&bytes[MAGIC.len() + 64..]).map_err(|e| corrupt(&e.to_string()))?;
        Ok(Self {
            postings,
            built_from: checksum,
        })
    }

    /// Reads the checksum header of a cache file without decoding the payload.
    pub fn cached_checksum(path: &Path) -> Option<String> {
        let bytes = fs::read(path).ok()?;
        if bytes.len() < MAGIC.len() + 64 || &bytes[..MAGIC.len()] != MAGIC {
            return None;
        }
        String::from_utf8(bytes[MAGIC.len()..MAGIC.len() + 64].to_vec()).ok()
    }

    /// Loads the cache when its checksum matches `corpus`, otherwise rebuilds and rewrites it.
    pub fn build_or_load(corpus: &ProcessedCorpus, cache_path: &Path) -> Result<(Self, CacheStatus), RetrievalError> {
        let checksum = corpus.checksum();
        if Self::cached_checksum(cache_path).as_deref() == Some(checksum.as_str()) {
            let bytes = fs::read(cache_path).map_err(|e| RetrievalError::Io(cache_path.to_path_buf(), e))?;
            if let Ok(index) = Self::from_bytes(&bytes) {
                return Ok((index, CacheStatus::Hit));
            }
        }
        let index = Self::build(corpus);
        index.write_cache(cache_path)?;
        Ok((index, CacheStatus::Built))
    }

    pub fn write_cache(&self, path: &Path) -> Result<(), RetrievalError> {
        let io = |e| RetrievalError::Io(path.to_path_buf(), e);
        let dir = path.parent().unwrap_or(Path::new("."));
        fs::create_dir_all(dir).map_err(io)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        tmp.write_all(&self.to_bytes()).map_err(io)?;
        tmp.persist(path).map_err(|e| io(e.error))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ProcessedDocument;

    pub(crate) fn fixture() -> ProcessedCorpus {
        let doc = |id: &str, toks: &[&str], t| ProcessedDocument {
            id: id.into(),
            tokens: toks.iter().map(|s| s.to_string()).collect(),
            time_index: t,
        };
        ProcessedCorpus::from_parts(
            vec![doc("d1", &["rbi", "atm"], 0), doc("d2", &["rbi"], 0), doc("d3", &["atm"], 1)],
            vec!["atm".into(), "rbi".into()],
            vec!["2015".into(), "2016".into()],
            None,
        )
        .unwrap()
    }

    #[test]
    fn postings_match_hand_scan() {
        let idx = InvertedIndex::build(&fixture());
        assert_eq!(idx.posting("rbi", 0), ["d1", "d2"]);
        assert!(idx.posting("rbi", 1).is_empty());
        assert_eq!(idx.posting("atm", 0), ["d1"]);
        assert_eq!(idx.posting("atm", 1), ["d3"]);
        assert!(idx.posting("upi", 0).is_empty());
    }

    #[test]
    fn cache_round_trip_and_hit() {
        let c = fixture();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(INDEX_CACHE_FILE);
        let (a, s1) = InvertedIndex::build_or_load(&c, &path).unwrap();
        let first_bytes = fs::read(&path).unwrap();
        let (b, s2) = InvertedIndex::build_or_load(&c, &path).unwrap();
        assert_eq!((s1, s2), (CacheStatus::Built, CacheStatus::Hit));
        assert_eq!(a, b);
        assert_eq!(first_bytes, a.to_bytes());
        assert!(InvertedIndex::from_bytes(b"garbage").is_err());
    }

    #[test]
    fn stale_cache_is_rebuilt() {
        let c = fixture();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(INDEX_CACHE_FILE);
        InvertedIndex::build_or_load(&c, &path).unwrap();
        let mut docs = c.documents.clone();
        docs.pop();
        let smaller = ProcessedCorpus::from_parts(docs, c.vocab.clone(), c.timestamps.clone(), None).unwrap();
        let (idx, status) = InvertedIndex::build_or_load(&smaller, &path).unwrap();
        assert_eq!(status, CacheStatus::Built);
        assert!(idx.posting("atm", 1).is_empty());
    }
}
