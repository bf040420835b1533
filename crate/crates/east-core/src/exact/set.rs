//! Subsets of the state space, used as hitting targets and capacitor plates.

use crate::error::{Error, Result};
use crate::model::Configuration;

/// A subset of the `2^L` states, with membership by state id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSet {
    members: Vec<bool>,
    count: usize,
}

impl StateSet {
    pub fn empty(space: usize) -> Self {
        Self {
            members: vec![false; space],
            count: 0,
        }
    }

    pub fn from_predicate(len: usize, pred: impl Fn(Configuration) -> bool) -> Self {
        let mut s = Self::empty(1 << len);
        for cfg in Configuration::enumerate(len) {
            if pred(cfg) {
                s.insert(cfg.id());
            }
        }
        s
    }

    /// `{ eta : eta_site = spin }`.
    pub fn spin_is(len: usize, site: usize, spin: u8) -> Self {
        Self::from_predicate(len, |cfg| cfg.spin(site) == spin)
    }

    pub fn singleton(space: usize, id: usize) -> Self {
        let mut s = Self::empty(space);
        s.insert(id);
        s
    }

    pub fn from_ids(space: usize, ids: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(space);
        for id in ids {
            s.insert(id);
        }
        s
    }

    pub fn insert(&mut self, id: usize) {
        if !self.members[id] {
            self.members[id] = true;
            self.count += 1;
        }
    }

    pub fn contains(&self, id: usize) -> bool {
        self.members[id]
    }

    pub fn space(&self) -> usize {
        self.members.len()
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn complement(&self) -> Self {
        Self {
            members: self.members.iter().map(|&m| !m).collect(),
            count: self.space() - self.count,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(id, &m)| m.then_some(id))
    }

    pub fn iter_complement(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(id, &m)| (!m).then_some(id))
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.iter().any(|id| other.contains(id))
    }

    /// Stable key for caching decompositions per target set.
    pub fn key(&self) -> Vec<u64> {
        let mut key = vec![0u64; self.space().div_ceil(64)];
        for id in self.iter() {
            key[id / 64] |= 1 << (id % 64);
        }
        key
    }

    /// Validates a hitting target: non-empty with non-empty complement.
    pub fn validate_target(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::BadTarget { what: "empty" });
        }
        if self.count == self.space() {
            return Err(Error::BadTarget {
                what: "the whole state space",
            });
        }
        Ok(())
    }
}
