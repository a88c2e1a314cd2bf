use std::collections::VecDeque;

use super::{Engine, Outcome, NEVER};

/// Request-count-window cache with cache-on-k-th-request admission.
///
/// Eviction is lazy: every hit or insertion pushes `(request index, object)`
/// onto a queue, and entries older than `L` requests are popped before each
/// request. An entry only evicts its object if it is still the object's most
/// recent request.
#[derive(Debug)]
pub(crate) struct RcwEngine {
    k: u32,
    lifetime: u64,
    window: u64,
    last: Vec<u64>,
    count: Vec<u32>,
    present: Vec<bool>,
    expiry: VecDeque<(u64, u32)>,
    occupancy: usize,
}

impl RcwEngine {
    pub(crate) fn new(n: usize, k: u32, lifetime: u64, window: u64) -> Self {
        Self {
            k,
            lifetime,
            window,
            last: vec![NEVER; n],
            count: vec![0; n],
            present: vec![false; n],
            expiry: VecDeque::new(),
            occupancy: 0,
        }
    }

    fn expire(&mut self, t: u64) {
        while let Some(&(t0, obj)) = self.expiry.front() {
            if t - t0 <= self.lifetime {
                break;
            }
            self.expiry.pop_front();
            let o = obj as usize;
            if self.present[o] && self.last[o] == t0 {
                self.present[o] = false;
                self.count[o] = 0;
                self.occupancy -= 1;
            }
        }
    }

    fn insert(&mut self, o: usize, t: u64) {
        self.present[o] = true;
        self.count[o] = self.k;
        self.occupancy += 1;
        self.expiry.push_back((t, o as u32));
    }
}

impl Engine for RcwEngine {
    fn prepare(&mut self, t: u64) {
        self.expire(t);
    }

    fn request(&mut self, o: usize, t: u64) -> Outcome {
        let gap = match self.last[o] {
            NEVER => u64::MAX,
            last => t - last,
        };
        self.last[o] = t;
        if self.present[o] {
            self.expiry.push_back((t, o as u32));
            return Outcome::Hit;
        }
        if self.count[o] >= self.k {
            // Still cached as far as the retained counters know, but the cache
            // was emptied underneath it.
            if gap <= self.lifetime {
                self.insert(o, t);
                return Outcome::Insert;
            }
            self.count[o] = 0;
        }
        if self.count[o] > 0 && gap <= self.window {
            self.count[o] += 1;
        } else {
            self.count[o] = 1;
        }
        if self.count[o] >= self.k {
            self.insert(o, t);
            Outcome::Insert
        } else {
            Outcome::Miss
        }
    }

    fn occupancy(&self) -> usize {
        self.occupancy
    }

    fn empty(&mut self) {
        for (_, obj) in self.expiry.drain(..) {
            self.present[obj as usize] = false;
        }
        self.occupancy = 0;
    }
}
