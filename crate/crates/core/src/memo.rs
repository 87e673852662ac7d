//! Process-wide memo tables for expensive deterministic numerics.
//!
//! Keys are built from the exact bit patterns of the inputs, so a hit always
//! returns the value the computation would have produced. Concurrent misses on
//! the same key may both compute; both write the same value.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::RwLock;

use crate::error::Result;

pub struct Memo<K> {
    table: RwLock<HashMap<K, Vec<f64>>>,
}

impl<K: Eq + Hash + Clone> Memo<K> {
    pub fn new() -> Self {
        Self {
            table: RwLock::new(HashMap::new()),
        }
    }

    pub fn get_or_try<F>(&self, key: K, compute: F) -> Result<Vec<f64>>
    where
        F: FnOnce() -> Result<Vec<f64>>,
    {
        if let Some(v) = self
            .table
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(&key)
        {
            return Ok(v.clone());
        }
        let value = compute()?;
        self.table
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .entry(key)
            .or_insert_with(|| value.clone());
        Ok(value)
    }

    pub fn len(&self) -> usize {
        self.table.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<K: Eq + Hash + Clone> Default for Memo<K> {
    fn default() -> Self {
        Self::new()
    }
}
