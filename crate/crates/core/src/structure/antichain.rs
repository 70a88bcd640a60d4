//! The maximal set of structures under embedding.
//!
//! A member `X` is dropped once some `X'` is present with `X ⊑ X'` and
//! `X' ⋢ X`. Structures that embed into each other in both directions are
//! both kept; isomorphic copies (equal canonical keys) are not.

use std::collections::HashMap;

use super::{find_embedding, LogicalStructure};

/// Outcome of [`AntichainSet::max_insert`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Insertion {
    Inserted { id: usize, removed: Vec<usize> },
    /// An isomorphic copy is already present.
    Duplicate { of: usize },
    /// Strictly below an existing member.
    Subsumed { by: usize },
}

impl Insertion {
    pub fn is_inserted(&self) -> bool {
        matches!(self, Insertion::Inserted { .. })
    }
}

#[derive(Clone, Debug, Default)]
pub struct AntichainSet {
    /// Every structure ever inserted; ids index into this.
    entries: Vec<LogicalStructure>,
    alive: Vec<bool>,
    by_key: HashMap<Vec<u8>, usize>,
    embedding_checks: usize,
}

fn embeds(s: &LogicalStructure, t: &LogicalStructure, checks: &mut usize) -> bool {
    if s.len() < t.len() {
        return false;
    }
    *checks += 1;
    find_embedding(s, t).is_some()
}

impl AntichainSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn max_insert(&mut self, s: LogicalStructure) -> Insertion {
        let key = s.canonical_key();
        if let Some(&of) = self.by_key.get(&key) {
            if self.alive[of] {
                return Insertion::Duplicate { of };
            }
        }
        let mut removed = Vec::new();
        for id in self.ids().collect::<Vec<_>>() {
            let x = &self.entries[id];
            let s_in_x = embeds(&s, x, &mut self.embedding_checks);
            let x_in_s = embeds(x, &s, &mut self.embedding_checks);
            if s_in_x && !x_in_s {
                return Insertion::Subsumed { by: id };
            }
            if x_in_s && !s_in_x {
                removed.push(id);
            }
        }
        for &id in &removed {
            self.alive[id] = false;
        }
        let id = self.entries.len();
        self.entries.push(s);
        self.alive.push(true);
        self.by_key.insert(key, id);
        Insertion::Inserted { id, removed }
    }

    /// Ids of current members, in insertion order.
    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.entries.len()).filter(|&i| self.alive[i])
    }

    pub fn members(&self) -> impl Iterator<Item = &LogicalStructure> {
        self.ids().map(|i| &self.entries[i])
    }

    pub fn get(&self, id: usize) -> Option<&LogicalStructure> {
        self.entries.get(id)
    }

    pub fn is_alive(&self, id: usize) -> bool {
        self.alive.get(id).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.alive.iter().filter(|a| **a).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of embedding searches run so far.
    pub fn embedding_checks(&self) -> usize {
        self.embedding_checks
    }

    /// Some member that `s` embeds into.
    pub fn covering(&self, s: &LogicalStructure) -> Option<usize> {
        self.ids().find(|&i| s.len() >= self.entries[i].len() && find_embedding(s, &self.entries[i]).is_some())
    }
}
