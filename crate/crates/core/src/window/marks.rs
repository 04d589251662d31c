//! A marked perfect binary tree stored as a heap-ordered bit array.
//!
//! Node 1 is the root, leaves occupy `[cap, 2·cap)`. A node's bit is the OR
//! of its children's bits, which makes nearest-marked-leaf queries
//! logarithmic.

#[derive(Clone, Debug)]
pub struct MarkTree {
    leaves: usize,
    cap: usize,
    bits: Vec<u64>,
}

impl MarkTree {
    pub fn new(leaves: usize) -> Self {
        let cap = leaves.max(1).next_power_of_two();
        Self {
            leaves,
            cap,
            bits: vec![0; (2 * cap).div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.leaves
    }

    pub fn is_empty(&self) -> bool {
        self.leaves == 0
    }

    #[inline]
    fn get(&self, node: usize) -> bool {
        self.bits[node / 64] >> (node % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, node: usize, on: bool) {
        if on {
            self.bits[node / 64] |= 1 << (node % 64);
        } else {
            self.bits[node / 64] &= !(1 << (node % 64));
        }
    }

    pub fn is_marked(&self, leaf: usize) -> bool {
        assert!(leaf < self.leaves, "leaf {leaf} out of range");
        self.get(self.cap + leaf)
    }

    pub fn mark(&mut self, leaf: usize) {
        assert!(leaf < self.leaves, "leaf {leaf} out of range");
        let mut node = self.cap + leaf;
        while node >= 1 && !self.get(node) {
            self.set(node, true);
            node >>= 1;
        }
    }

    pub fn unmark(&mut self, leaf: usize) {
        assert!(leaf < self.leaves, "leaf {leaf} out of range");
        let mut node = self.cap + leaf;
        if !self.get(node) {
            return;
        }
        self.set(node, false);
        node >>= 1;
        while node >= 1 {
            let on = self.get(2 * node) || self.get(2 * node + 1);
            if on == self.get(node) {
                break;
            }
            self.set(node, on);
            node >>= 1;
        }
    }

    pub fn clear(&mut self) {
        self.bits.fill(0);
    }

    /// Largest marked leaf strictly below `leaf`.
    pub fn pred(&self, leaf: usize) -> Option<usize> {
        let mut node = self.cap + leaf;
        while node > 1 {
            if node & 1 == 1 && self.get(node - 1) {
                let mut v = node - 1;
                while v < self.cap {
                    v = if self.get(2 * v + 1) { 2 * v + 1 } else { 2 * v };
                }
                return Some(v - self.cap);
            }
            node >>= 1;
        }
        None
    }

    /// Smallest marked leaf strictly above `leaf`.
    pub fn succ(&self, leaf: usize) -> Option<usize> {
        let mut node = self.cap + leaf;
        while node > 1 {
            if node & 1 == 0 && self.get(node + 1) {
                let mut v = node + 1;
                while v < self.cap {
                    v = if self.get(2 * v) { 2 * v } else { 2 * v + 1 };
                }
                return Some(v - self.cap);
            }
            node >>= 1;
        }
        None
    }

    pub fn marked_leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.leaves).filter(|&l| self.get(self.cap + l))
    }

    /// Every internal bit equals the OR of its children.
    pub fn audit(&self) -> bool {
        (1..self.cap).all(|v| self.get(v) == (self.get(2 * v) || self.get(2 * v + 1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mark_unmark_restores() {
        let mut t = MarkTree::new(13);
        let before = t.bits.clone();
        t.mark(5);
        assert!(t.is_marked(5));
        assert_eq!(t.pred(9), Some(5));
        assert_eq!(t.succ(2), Some(5));
        assert_eq!(t.pred(5), None);
        t.unmark(5);
        assert_eq!(t.bits, before);
        assert!(t.audit());
    }

    proptest! {
        #[test]
        fn pred_succ_match_scan(n in 1usize..200, ops in proptest::collection::vec((any::<bool>(), any::<usize>()), 0..300)) {
            let mut t = MarkTree::new(n);
            let mut set = vec![false; n];
            for (on, x) in ops {
                let x = x % n;
                if on { t.mark(x) } else { t.unmark(x) }
                set[x] = on;
            }
            prop_assert!(t.audit());
            for q in 0..n {
                let p = (0..q).rev().find(|&i| set[i]);
                let s = (q + 1..n).find(|&i| set[i]);
                prop_assert_eq!(t.pred(q), p);
                prop_assert_eq!(t.succ(q), s);
            }
        }
    }
}
