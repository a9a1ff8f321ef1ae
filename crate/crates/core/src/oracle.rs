//! Brute-force reference model for differential testing.
//!
//! A map of the current bindings plus a stack of whole-map snapshots, one per
//! open environment. Opening clones the map and closing throws the current
//! map away. Nothing is shared with the trie, and keys are compared as raw
//! bit strings so a bug in key handling cannot hide on both sides.

use std::collections::BTreeMap;

use crate::bitstr::BitString;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct OracleDict<V> {
    bindings: BTreeMap<BitString, V>,
    snapshots: Vec<BTreeMap<BitString, V>>,
}

impl<V: Clone> OracleDict<V> {
    pub fn new() -> Self {
        OracleDict { bindings: BTreeMap::new(), snapshots: Vec::new() }
    }

    pub fn insert(&mut self, k: BitString, v: V) {
        self.bindings.insert(k, v);
    }

    pub fn remove(&mut self, k: &BitString) {
        self.bindings.remove(k);
    }

    pub fn lookup(&self, k: &BitString) -> Option<V> {
        self.bindings.get(k).cloned()
    }

    pub fn open(&mut self) {
        self.snapshots.push(self.bindings.clone());
    }

    pub fn close(&mut self) -> Result<()> {
        self.bindings = self.snapshots.pop().ok_or(Error::Underflow)?;
        Ok(())
    }

    /// Frames including the base one, matching `ScopedDictionary::depth`.
    pub fn depth(&self) -> usize {
        self.snapshots.len() + 1
    }

    pub fn bindings(&self) -> &BTreeMap<BitString, V> {
        &self.bindings
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}
