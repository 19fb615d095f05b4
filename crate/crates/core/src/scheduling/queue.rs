use std::cmp::Ordering;
use std::collections::BTreeMap;

pub const DEFAULT_QUEUE_CAPACITY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key {
    rank: f64,
    seq: u64,
}

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank.total_cmp(&other.rank).then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
struct Slot<T> {
    release: f64,
    item: T,
}

/// Bounded per-node transmit queue.
///
/// Entries are served in ascending `(rank, arrival)`; the head becomes
/// eligible once its release time passes. RTS ranks by release time; the
/// VMS baselines rank by negated velocity with an immediate release. On
/// overflow the entry ranked last is evicted, which may be the newcomer.
#[derive(Debug, Clone)]
pub struct ReleaseQueue<T> {
    entries: BTreeMap<Key, Slot<T>>,
    capacity: usize,
    next_seq: u64,
}

impl<T> ReleaseQueue<T> {
    pub fn new(capacity: usize) -> Self {
        ReleaseQueue {
            entries: BTreeMap::new(),
            capacity: capacity.max(1),
            next_seq: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Insert with `release = now + target_delay` ranked by release time.
    pub fn enqueue_for_release(&mut self, item: T, target_delay: f64, now: f64) -> Option<T> {
        let release = now + target_delay.max(0.0);
        self.push(item, release, release)
    }

    /// Insert with an explicit rank. Returns the evicted item, if any.
    pub fn push(&mut self, item: T, release: f64, rank: f64) -> Option<T> {
        let key = Key {
            rank,
            seq: self.next_seq,
        };
        self.next_seq += 1;
        if self.entries.len() >= self.capacity {
            let (&worst, _) = self.entries.last_key_value().expect("capacity >= 1");
            if key > worst {
                return Some(item);
            }
            let evicted = self.entries.remove(&worst).expect("present").item;
            self.entries.insert(key, Slot { release, item });
            return Some(evicted);
        }
        self.entries.insert(key, Slot { release, item });
        None
    }

    /// Release time of the head entry.
    pub fn next_release(&self) -> Option<f64> {
        self.entries.first_key_value().map(|(_, s)| s.release)
    }

    /// Remove the head if it is due at `now`.
    pub fn pop_due(&mut self, now: f64) -> Option<T> {
        match self.next_release() {
            Some(r) if r <= now => self.entries.pop_first().map(|(_, s)| s.item),
            _ => None,
        }
    }

    pub fn drain(&mut self) -> impl Iterator<Item = T> + '_ {
        std::mem::take(&mut self.entries).into_values().map(|s| s.item)
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.values().map(|s| &s.item)
    }
}
