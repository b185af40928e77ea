//! Per-key memo tables shared between threads.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

/// A cache where each key is written at most once. Values are computed
/// outside the lock; if two threads race on a key the first insertion wins
/// and both observe the same value afterwards.
#[derive(Debug)]
pub struct Memo<K, V> {
    map: Mutex<HashMap<K, Arc<V>>>,
}

impl<K: Eq + Hash + Clone, V> Default for Memo<K, V> {
    fn default() -> Self {
        Memo { map: Mutex::new(HashMap::new()) }
    }
}

impl<K: Eq + Hash + Clone, V> Memo<K, V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, k: &K) -> Option<Arc<V>> {
        self.map.lock().expect("memo lock").get(k).cloned()
    }

    pub fn insert(&self, k: K, v: V) -> Arc<V> {
        let mut m = self.map.lock().expect("memo lock");
        Arc::clone(m.entry(k).or_insert_with(|| Arc::new(v)))
    }

    pub fn get_or_try<E>(&self, k: &K, f: impl FnOnce() -> Result<V, E>) -> Result<Arc<V>, E> {
        if let Some(v) = self.get(k) {
            return Ok(v);
        }
        let v = f()?;
        Ok(self.insert(k.clone(), v))
    }
}
