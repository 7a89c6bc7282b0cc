use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use lru::LruCache;
use topicscope_llm::GroundedSession;

pub const DEFAULT_CAPACITY: usize = 256;
pub const DEFAULT_TTL: Duration = Duration::from_secs(3600);

pub type SharedSession = Arc<tokio::sync::Mutex<GroundedSession>>;

struct Slot {
    touched: Instant,
    session: SharedSession,
}

/// In-memory sessions, least recently used evicted past `capacity`,
/// idle ones expired after `ttl`. Each session has its own async lock.
pub struct SessionStore {
    slots: Mutex<LruCache<String, Slot>>,
    ttl: Duration,
}

impl std::fmt::Debug for SessionStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SessionStore").field("len", &self.len()).field("ttl", &self.ttl).finish()
    }
}

impl Default for SessionStore {
    fn default() -> Self {
        Self::new(DEFAULT_CAPACITY, DEFAULT_TTL)
    }
}

impl SessionStore {
    pub fn new(capacity: usize, ttl: Duration) -> Self {
        let cap = NonZeroUsize::new(capacity.max(1)).expect("capacity is at least one");
        Self { slots: Mutex::new(LruCache::new(cap)), ttl }
    }

    /// Stores `docs` under a fresh id and returns it.
    pub fn create(&self, docs: Vec<String>, summary: Option<String>) -> String {
        self.create_at(docs, summary, Instant::now())
    }

    fn create_at(&self, docs: Vec<String>, summary: Option<String>, now: Instant) -> String {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let mut session = GroundedSession::new(id.clone(), docs);
        session.summary = summary;
        let slot = Slot { touched: now, session: Arc::new(tokio::sync::Mutex::new(session)) };
        self.slots.lock().expect("session store poisoned").put(id.clone(), slot);
        id
    }

    pub fn get(&self, id: &str) -> Option<SharedSession> {
        self.get_at(id, Instant::now())
    }

    fn get_at(&self, id: &str, now: Instant) -> Option<SharedSession> {
        let mut slots = self.slots.lock().expect("session store poisoned");
        let expired = match slots.get_mut(id) {
            None => return None,
            Some(slot) if now.duration_since(slot.touched) > self.ttl => true,
            Some(slot) => {
                slot.touched = now;
                return Some(slot.session.clone());
            }
        };
        if expired {
            slots.pop(id);
        }
        None
    }

    pub fn len(&self) -> usize {
        self.slots.lock().expect("session store poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lru_eviction_and_ttl() {
        let store = SessionStore::new(2, Duration::from_secs(10));
        let t0 = Instant::now();
        let a = store.create_at(vec!["x".into()], None, t0);
        let b = store.create_at(vec!["y".into()], None, t0);
        assert!(store.get_at(&a, t0).is_some());
        let c = store.create_at(vec!["z".into()], None, t0);
        // b was least recently used
        assert!(store.get_at(&b, t0).is_none());
        assert!(store.get_at(&a, t0).is_some());
        assert!(store.get_at(&c, t0 + Duration::from_secs(11)).is_none());
        assert_eq!(store.len(), 1);
        assert!(store.get_at(&a, t0 + Duration::from_secs(5)).is_some());
    }
}
