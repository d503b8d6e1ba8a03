//! Binary indexed tree over row weights with weighted descent.

use std::ops::{AddAssign, SubAssign};

pub trait Weight: Copy + Default + PartialOrd + AddAssign + SubAssign {}
impl Weight for u64 {}
impl Weight for f64 {}

#[derive(Debug, Clone)]
pub struct Fenwick<W> {
    tree: Vec<W>,
}

impl<W: Weight> Fenwick<W> {
    pub fn from_weights(weights: &[W]) -> Self {
        let n = weights.len();
        let mut tree = vec![W::default(); n + 1];
        for (i, &w) in weights.iter().enumerate() {
            tree[i + 1] += w;
        }
        for i in 1..=n {
            let parent = i + (i & i.wrapping_neg());
            if parent <= n {
                let v = tree[i];
                tree[parent] += v;
            }
        }
        Fenwick { tree }
    }

    pub fn len(&self) -> usize {
        self.tree.len() - 1
    }

    pub fn add(&mut self, index: usize, delta: W) {
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    pub fn sub(&mut self, index: usize, delta: W) {
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] -= delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of weights `[0, end)`.
    pub fn prefix(&self, end: usize) -> W {
        let mut acc = W::default();
        let mut i = end;
        while i > 0 {
            acc += self.tree[i];
            i &= i - 1;
        }
        acc
    }

    pub fn total(&self) -> W {
        self.prefix(self.len())
    }

    /// Smallest index `i` with `prefix(i + 1) > target`, or `len()` when the
    /// target is at or beyond the total.
    pub fn search(&self, mut target: W) -> usize {
        let n = self.len();
        let mut pos = 0;
        let mut step = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        pos
    }
}
