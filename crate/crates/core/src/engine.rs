//! Shared evaluation state: solved WDVV levels, B values, relational results
//! and the persistent cache they are mirrored into.
//!
//! Every method takes `&self`; an `Engine` can be shared across threads.
//! Reads run concurrently, writes to each table are serialized by its lock.

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, RwLock, RwLockReadGuard};

use crate::bracket::Dr1Bracket;
use crate::error::Result;
use crate::rational::Rational;
use crate::store::CacheStore;

/// Values of one genus-0 point count at one `r`: `Some` when WDVV determined
/// the bracket, `None` when it stayed free.
pub(crate) type Level = HashMap<Vec<u32>, Option<Rational>>;

#[derive(Debug, Default)]
pub struct Engine {
    store: RwLock<CacheStore>,
    pub(crate) g0_levels: RwLock<HashMap<(u32, usize), Arc<Level>>>,
    pub(crate) b_memo: RwLock<HashMap<(u32, Vec<u32>), Rational>>,
    pub(crate) dr1_memo: RwLock<HashMap<Dr1Bracket, Rational>>,
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_store(store: CacheStore) -> Self {
        Engine { store: RwLock::new(store), ..Self::default() }
    }

    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::with_store(CacheStore::load_or_default(path)?))
    }

    pub fn store(&self) -> RwLockReadGuard<'_, CacheStore> {
        self.store.read().unwrap_or_else(|e| e.into_inner())
    }

    pub fn cached(&self, key: &str) -> Option<Rational> {
        self.store().get(key).cloned()
    }

    pub(crate) fn remember(&self, entries: impl IntoIterator<Item = (String, Rational)>) {
        let mut store = self.store.write().unwrap_or_else(|e| e.into_inner());
        for (k, v) in entries {
            store.put_canonical(k, v);
        }
    }

    /// Saves the cache if anything was added since it was loaded.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut store = self.store.write().unwrap_or_else(|e| e.into_inner());
        if store.is_dirty() {
            store.save(path)?;
        }
        Ok(())
    }
}
