//! Byte-bounded component cache keyed by signature.
//!
//! An entry's score is its hit count; all scores are halved every
//! [`DECAY_INTERVAL`] stores. Eviction removes the lowest score first, oldest
//! first among equal scores. Entries stored after a [`ComponentCache::mark`]
//! can be withdrawn with [`ComponentCache::purge_since`].

use std::collections::{BTreeSet, HashMap};

use super::component::Signature;

pub const DECAY_INTERVAL: u64 = 100_000;
/// Bookkeeping bytes charged per entry on top of the value itself.
pub const ENTRY_OVERHEAD: usize = 96;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub stores: u64,
    pub evictions: u64,
    pub purged: u64,
}

struct Entry<V> {
    value: V,
    score: u64,
    seq: u64,
    bytes: usize,
}

pub struct ComponentCache<V> {
    capacity_bytes: usize,
    used_bytes: usize,
    entries: HashMap<Signature, Entry<V>>,
    order: BTreeSet<(u64, u64, Signature)>,
    /// `(seq, signature)` in store order; may hold stale records.
    log: Vec<(u64, Signature)>,
    next_seq: u64,
    stats: CacheStats,
}

impl<V: Clone> ComponentCache<V> {
    pub fn new(capacity_bytes: usize) -> ComponentCache<V> {
        ComponentCache {
            capacity_bytes,
            used_bytes: 0,
            entries: HashMap::new(),
            order: BTreeSet::new(),
            log: Vec::new(),
            next_seq: 0,
            stats: CacheStats::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn used_bytes(&self) -> usize {
        self.used_bytes
    }

    pub fn stats(&self) -> CacheStats {
        self.stats
    }

    pub fn score(&self, sig: &Signature) -> Option<u64> {
        self.entries.get(sig).map(|e| e.score)
    }

    /// Looks up `sig`, bumping its score on a hit.
    pub fn get(&mut self, sig: &Signature) -> Option<V> {
        match self.entries.get_mut(sig) {
            Some(e) => {
                self.order.remove(&(e.score, e.seq, *sig));
                e.score += 1;
                self.order.insert((e.score, e.seq, *sig));
                self.stats.hits += 1;
                Some(e.value.clone())
            }
            None => {
                self.stats.misses += 1;
                None
            }
        }
    }

    /// Stores `value` (whose own footprint is `value_bytes`), evicting
    /// low-score entries to stay within capacity.
    pub fn put(&mut self, sig: Signature, value: V, value_bytes: usize) {
        let bytes = value_bytes + ENTRY_OVERHEAD;
        self.remove(&sig);
        if bytes > self.capacity_bytes {
            return;
        }
        while self.used_bytes + bytes > self.capacity_bytes {
            let Some(&(_, _, victim)) = self.order.first() else { break };
            self.remove(&victim);
            self.stats.evictions += 1;
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.entries.insert(
            sig,
            Entry {
                value,
                score: 0,
                seq,
                bytes,
            },
        );
        self.order.insert((0, seq, sig));
        self.log.push((seq, sig));
        self.used_bytes += bytes;
        self.stats.stores += 1;
        if self.stats.stores.is_multiple_of(DECAY_INTERVAL) {
            self.decay();
        }
        if self.log.len() > 2 * self.entries.len() + 1024 {
            self.compact_log();
        }
    }

    fn remove(&mut self, sig: &Signature) -> bool {
        match self.entries.remove(sig) {
            Some(e) => {
                self.order.remove(&(e.score, e.seq, *sig));
                self.used_bytes -= e.bytes;
                true
            }
            None => false,
        }
    }

    fn decay(&mut self) {
        self.order.clear();
        for (sig, e) in self.entries.iter_mut() {
            e.score /= 2;
            self.order.insert((e.score, e.seq, *sig));
        }
    }

    fn compact_log(&mut self) {
        let entries = &self.entries;
        self.log.retain(|(seq, sig)| entries.get(sig).is_some_and(|e| e.seq == *seq));
    }

    /// Position to later purge back to.
    pub fn mark(&self) -> u64 {
        self.next_seq
    }

    /// Removes every entry stored at or after `mark`.
    pub fn purge_since(&mut self, mark: u64) {
        while let Some(&(seq, sig)) = self.log.last() {
            if seq < mark {
                break;
            }
            self.log.pop();
            let live = self.entries.get(&sig).is_some_and(|e| e.seq == seq);
            if live && self.remove(&sig) {
                self.stats.purged += 1;
            }
        }
    }
}
