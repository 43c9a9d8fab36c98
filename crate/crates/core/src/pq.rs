//! Banks of binary min-heaps with a shared position map, supporting removal
//! of arbitrary elements in logarithmic time.
//!
//! All heaps of a bank draw elements from the same dense local index range
//! `0..capacity`. Positions are stored element-major (`pos[local * k + q]`),
//! so touching one element in every heap reads one contiguous row. Order is
//! by key, then by the element's global node id.

use crate::graph::{NodeId, NONE};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeapEntry {
    pub key: f64,
    pub site: NodeId,
    pub local: u32,
}

impl HeapEntry {
    #[inline]
    fn precedes(&self, other: &HeapEntry) -> bool {
        self.key < other.key || (self.key == other.key && self.site < other.site)
    }
}

#[derive(Clone, Debug, Default)]
pub struct QueueBank {
    heaps: Vec<Vec<HeapEntry>>,
    pos: Vec<u32>,
}

/// One heap of a bank together with its column of the position map.
struct Slot<'a> {
    heap: &'a mut Vec<HeapEntry>,
    pos: &'a mut [u32],
    stride: usize,
    q: usize,
}

impl Slot<'_> {
    #[inline]
    fn set(&mut self, local: u32, i: usize) {
        self.pos[local as usize * self.stride + self.q] = i as u32;
    }

    #[inline]
    fn get(&self, local: u32) -> u32 {
        self.pos[local as usize * self.stride + self.q]
    }

    fn sift_up(&mut self, mut i: usize) {
        let e = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !e.precedes(&self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.set(self.heap[i].local, i);
            i = parent;
        }
        self.heap[i] = e;
        self.set(e.local, i);
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.heap.len();
        let e = self.heap[i];
        loop {
            let left = 2 * i + 1;
            if left >= n {
                break;
            }
            let right = left + 1;
            let child = if right < n && self.heap[right].precedes(&self.heap[left]) {
                right
            } else {
                left
            };
            if !self.heap[child].precedes(&e) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.set(self.heap[i].local, i);
            i = child;
        }
        self.heap[i] = e;
        self.set(e.local, i);
    }

    fn insert(&mut self, entry: HeapEntry) -> bool {
        if self.get(entry.local) != NONE {
            return false;
        }
        let i = self.heap.len();
        self.heap.push(entry);
        self.sift_up(i);
        true
    }

    fn remove(&mut self, local: u32) -> bool {
        let i = self.get(local);
        if i == NONE {
            return false;
        }
        let i = i as usize;
        self.pos[local as usize * self.stride + self.q] = NONE;
        let last = self.heap.pop().expect("position map says nonempty");
        if i < self.heap.len() {
            self.heap[i] = last;
            if i > 0 && last.precedes(&self.heap[(i - 1) / 2]) {
                self.sift_up(i);
            } else {
                self.sift_down(i);
            }
        }
        true
    }
}

impl QueueBank {
    /// `queues` empty heaps over elements `0..capacity`.
    pub fn new(queues: usize, capacity: usize) -> Self {
        QueueBank {
            heaps: vec![Vec::new(); queues],
            pos: vec![NONE; queues * capacity],
        }
    }

    #[inline]
    fn slot(&mut self, q: usize) -> Slot<'_> {
        Slot {
            stride: self.heaps.len(),
            heap: &mut self.heaps[q],
            pos: &mut self.pos,
            q,
        }
    }

    pub fn queue_count(&self) -> usize {
        self.heaps.len()
    }

    pub fn capacity(&self) -> usize {
        self.pos.len().checked_div(self.heaps.len()).unwrap_or(0)
    }

    pub fn len(&self, q: usize) -> usize {
        self.heaps[q].len()
    }

    pub fn is_empty(&self, q: usize) -> bool {
        self.heaps[q].is_empty()
    }

    #[inline]
    pub fn peek(&self, q: usize) -> Option<&HeapEntry> {
        self.heaps[q].first()
    }

    pub fn contains(&self, q: usize, local: u32) -> bool {
        self.pos[local as usize * self.heaps.len() + q] != NONE
    }

    /// Entries of heap `q` in heap order.
    pub fn iter(&self, q: usize) -> impl Iterator<Item = &HeapEntry> {
        self.heaps[q].iter()
    }

    /// Inserts into heap `q`; returns false if the element was present.
    pub fn insert(&mut self, q: usize, entry: HeapEntry) -> bool {
        self.slot(q).insert(entry)
    }

    /// Inserts `local` into every heap, with `keys[q]` as its key in heap `q`.
    pub fn insert_all(&mut self, site: NodeId, local: u32, keys: &[f64]) {
        debug_assert_eq!(keys.len(), self.heaps.len());
        for (q, &key) in keys.iter().enumerate() {
            self.slot(q).insert(HeapEntry { key, site, local });
        }
    }

    /// Removes from heap `q`; returns false if the element was absent.
    pub fn remove(&mut self, q: usize, local: u32) -> bool {
        self.slot(q).remove(local)
    }

    /// Removes `local` from every heap.
    pub fn remove_all(&mut self, local: u32) {
        for q in 0..self.heaps.len() {
            self.slot(q).remove(local);
        }
    }

    pub fn pop(&mut self, q: usize) -> Option<HeapEntry> {
        let top = *self.heaps[q].first()?;
        self.remove(q, top.local);
        Some(top)
    }

    /// Replaces the contents of heap `q` with distinct `entries` in linear
    /// time, keeping allocations.
    pub fn rebuild(&mut self, q: usize, entries: impl IntoIterator<Item = HeapEntry>) {
        let mut slot = self.slot(q);
        for i in 0..slot.heap.len() {
            let local = slot.heap[i].local;
            slot.pos[local as usize * slot.stride + q] = NONE;
        }
        slot.heap.clear();
        slot.heap.extend(entries);
        for i in 0..slot.heap.len() {
            let local = slot.heap[i].local;
            debug_assert_eq!(slot.get(local), NONE, "duplicate entry");
            slot.set(local, i);
        }
        for i in (0..slot.heap.len() / 2).rev() {
            slot.sift_down(i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn entry(local: u32, key: f64) -> HeapEntry {
        // global id reversed so that ties are not decided by local order
        HeapEntry {
            key,
            site: 1000 - local,
            local,
        }
    }

    #[test]
    fn ties_break_on_site_id() {
        let mut h = QueueBank::new(1, 4);
        h.insert(0, entry(0, 2.0));
        h.insert(0, entry(1, 2.0));
        h.insert(0, entry(2, f64::INFINITY));
        assert_eq!(h.peek(0).unwrap().local, 1);
        assert!(!h.insert(0, entry(1, 0.0)));
        assert!(h.remove(0, 1));
        assert!(!h.remove(0, 1));
        assert_eq!(h.pop(0).unwrap().local, 0);
        assert_eq!(h.pop(0).unwrap().local, 2);
        assert!(h.pop(0).is_none());
    }

    #[test]
    fn row_operations_touch_every_heap() {
        let mut b = QueueBank::new(3, 5);
        assert_eq!((b.queue_count(), b.capacity()), (3, 5));
        b.insert_all(1000, 0, &[3.0, 1.0, 2.0]);
        b.insert_all(999, 1, &[1.0, 3.0, 2.0]);
        assert_eq!(b.peek(0).unwrap().local, 1);
        assert_eq!(b.peek(1).unwrap().local, 0);
        assert_eq!(b.peek(2).unwrap().local, 1);
        b.remove_all(1);
        assert!((0..3).all(|q| b.len(q) == 1 && b.peek(q).unwrap().local == 0));
        assert!(!b.contains(2, 1) && b.contains(2, 0));
        assert_eq!(QueueBank::new(0, 5).capacity(), 0);
    }

    proptest! {
        #[test]
        fn matches_ordered_model(
            init in prop::collection::btree_map(0u32..64, 0u32..20, 0..40),
            ops in prop::collection::vec((0usize..3, any::<bool>(), 0u32..64, 0u32..20), 0..300),
        ) {
            let mut models: Vec<BTreeMap<u32, f64>> =
                vec![init.iter().map(|(&l, &k)| (l, k as f64)).collect(); 3];
            let mut h = QueueBank::new(3, 64);
            for (q, model) in models.iter().enumerate() {
                h.rebuild(q, model.iter().map(|(&l, &k)| entry(l, k)));
            }
            for (q, ins, local, key) in ops {
                let model = &mut models[q];
                if ins {
                    let fresh = !model.contains_key(&local);
                    prop_assert_eq!(h.insert(q, entry(local, key as f64)), fresh);
                    model.entry(local).or_insert(key as f64);
                } else {
                    prop_assert_eq!(h.remove(q, local), model.remove(&local).is_some());
                }
                for (q, model) in models.iter().enumerate() {
                    let expect = model
                        .iter()
                        .map(|(&l, &k)| (k, 1000 - l))
                        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                    prop_assert_eq!(h.peek(q).map(|e| (e.key, e.site)), expect);
                    prop_assert_eq!(h.len(q), model.len());
                }
            }
        }
    }
}
