use super::{Engine, Outcome, NEVER};

const NIL: u32 = u32::MAX;

/// Fixed-capacity LRU cache with cache-on-k-th-request admission.
///
/// The candidate window is the request age of the least recently used cached
/// object while the cache is full, and unbounded while it is filling. Recency
/// order is an intrusive doubly linked list over object indices.
#[derive(Debug)]
pub(crate) struct LruEngine {
    k: u32,
    capacity: usize,
    last: Vec<u64>,
    count: Vec<u32>,
    present: Vec<bool>,
    prev: Vec<u32>,
    next: Vec<u32>,
    head: u32,
    tail: u32,
    size: usize,
}

impl LruEngine {
    pub(crate) fn new(n: usize, capacity: usize, k: u32) -> Self {
        Self {
            k,
            capacity,
            last: vec![NEVER; n],
            count: vec![0; n],
            present: vec![false; n],
            prev: vec![NIL; n],
            next: vec![NIL; n],
            head: NIL,
            tail: NIL,
            size: 0,
        }
    }

    pub(crate) fn is_full(&self) -> bool {
        self.size >= self.capacity
    }

    fn unlink(&mut self, o: u32) {
        let (p, n) = (self.prev[o as usize], self.next[o as usize]);
        if p == NIL {
            self.head = n;
        } else {
            self.next[p as usize] = n;
        }
        if n == NIL {
            self.tail = p;
        } else {
            self.prev[n as usize] = p;
        }
        self.prev[o as usize] = NIL;
        self.next[o as usize] = NIL;
    }

    fn push_front(&mut self, o: u32) {
        self.prev[o as usize] = NIL;
        self.next[o as usize] = self.head;
        if self.head != NIL {
            self.prev[self.head as usize] = o;
        } else {
            self.tail = o;
        }
        self.head = o;
    }

    fn admit(&mut self, o: usize) {
        if self.is_full() {
            let victim = self.tail;
            self.unlink(victim);
            self.present[victim as usize] = false;
            self.count[victim as usize] = 0;
            self.size -= 1;
        }
        self.present[o] = true;
        self.count[o] = self.k;
        self.push_front(o as u32);
        self.size += 1;
    }
}

impl Engine for LruEngine {
    fn prepare(&mut self, _t: u64) {}

    fn request(&mut self, o: usize, t: u64) -> Outcome {
        let gap = match self.last[o] {
            NEVER => u64::MAX,
            last => t - last,
        };
        let window = if self.is_full() && self.tail != NIL {
            t - self.last[self.tail as usize]
        } else {
            u64::MAX
        };
        self.last[o] = t;
        if self.present[o] {
            self.unlink(o as u32);
            self.push_front(o as u32);
            return Outcome::Hit;
        }
        if self.count[o] > 0 && gap <= window {
            self.count[o] = self.count[o].saturating_add(1);
        } else {
            self.count[o] = 1;
        }
        if self.count[o] >= self.k {
            self.admit(o);
            Outcome::Insert
        } else {
            Outcome::Miss
        }
    }

    fn occupancy(&self) -> usize {
        self.size
    }

    fn empty(&mut self) {
        let mut o = self.head;
        while o != NIL {
            let next = self.next[o as usize];
            self.present[o as usize] = false;
            self.prev[o as usize] = NIL;
            self.next[o as usize] = NIL;
            o = next;
        }
        self.head = NIL;
        self.tail = NIL;
        self.size = 0;
    }
}
