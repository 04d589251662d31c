//! Per-phase scratch structures over the text window `s[lo..=hi]`.
//!
//! The suffix array sorts the reversed prefixes `reverse(s[lo..=k])` for every
//! `k` in the window, so adjacent ranks share long common *suffixes* of the
//! forward text. All indices handed out here are window-local offsets
//! (`k - lo`) unless a name says otherwise.

mod marks;
mod rmq;
mod sa;

use std::collections::BTreeMap;

pub use marks::MarkTree;
pub use rmq::Rmq;
pub use sa::{lcp_array, suffix_array};

use crate::fingerprint::{FingerprintContext, Fp, WindowFingerprints};

pub struct WindowIndex {
    lo: u64,
    text: Vec<u8>,
    sa: Vec<u32>,
    isa: Vec<u32>,
    rmq: Rmq,
    fps: WindowFingerprints,
}

impl WindowIndex {
    /// `text` holds `s[lo..=lo + text.len() - 1]` (1-based absolute positions).
    /// `ctx` must have powers up to `text.len()`.
    pub fn build(text: Vec<u8>, lo: u64, ctx: &FingerprintContext) -> Self {
        let w = text.len();
        let rev: Vec<u8> = text.iter().rev().copied().collect();
        let rsa = suffix_array(&rev);
        let lcp = lcp_array(&rev, &rsa);
        drop(rev);
        // suffix `t` of the reversed window is reverse(s[lo..=lo + w - 1 - t])
        let sa: Vec<u32> = rsa.iter().map(|&t| (w - 1) as u32 - t).collect();
        drop(rsa);
        let mut isa = vec![0u32; w];
        for (r, &k) in sa.iter().enumerate() {
            isa[k as usize] = r as u32;
        }
        let fps = WindowFingerprints::build(&text, ctx);
        Self {
            lo,
            text,
            sa,
            isa,
            rmq: Rmq::new(lcp),
            fps,
        }
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    /// Last absolute position covered.
    pub fn hi(&self) -> u64 {
        self.lo + self.text.len() as u64 - 1
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    pub fn contains(&self, pos: u64) -> bool {
        pos >= self.lo && pos < self.lo + self.text.len() as u64
    }

    #[inline]
    pub fn local(&self, pos: u64) -> usize {
        debug_assert!(self.contains(pos), "position {pos} outside window");
        (pos - self.lo) as usize
    }

    pub fn text(&self) -> &[u8] {
        &self.text
    }

    pub fn into_text(self) -> Vec<u8> {
        self.text
    }

    /// Character at absolute position `pos`.
    #[inline]
    pub fn at(&self, pos: u64) -> u8 {
        self.text[self.local(pos)]
    }

    pub fn sa(&self) -> &[u32] {
        &self.sa
    }

    pub fn isa(&self) -> &[u32] {
        &self.isa
    }

    pub fn lcp(&self) -> &[u32] {
        self.rmq.values()
    }

    pub fn rank(&self, pos: u64) -> usize {
        self.isa[self.local(pos)] as usize
    }

    /// `lhash` of the `len` characters ending at absolute position `end`.
    #[inline]
    pub fn lhash_ending_at(&self, end: u64, len: usize, ctx: &FingerprintContext) -> Fp {
        self.fps.lhash_ending_at(self.local(end), len, ctx)
    }

    /// Longest common suffix, within the window, of `s[lo..=a]` and `s[lo..=b]`.
    pub fn common_suffix(&self, a: u64, b: u64) -> usize {
        if a == b {
            return self.local(a) + 1;
        }
        let (ra, rb) = (self.rank(a), self.rank(b));
        let (l, r) = (ra.min(rb), ra.max(rb));
        self.rmq.min(l + 1, r) as usize
    }

    /// Among marked ranks other than `q`'s own, the position whose prefix
    /// shares the longest suffix with `s[lo..=q]`. Returns `(length, position)`
    /// with absolute `position`, or `None` when no other rank is marked.
    /// On equal lengths the successor side wins.
    pub fn marked_lcp(&self, marks: &MarkTree, q: u64) -> Option<(usize, u64)> {
        let r = self.rank(q);
        let left = marks.pred(r);
        let right = marks.succ(r);
        let y_left = left.map(|i| self.rmq.min(i + 1, r) as usize);
        let y_right = right.map(|i| self.rmq.min(r + 1, i) as usize);
        match (left, right) {
            (None, None) => None,
            (Some(i), None) => Some((y_left.unwrap(), self.lo + self.sa[i] as u64)),
            (None, Some(i)) => Some((y_right.unwrap(), self.lo + self.sa[i] as u64)),
            (Some(i), Some(j)) => {
                if y_left.unwrap() > y_right.unwrap() {
                    Some((y_left.unwrap(), self.lo + self.sa[i] as u64))
                } else {
                    Some((y_right.unwrap(), self.lo + self.sa[j] as u64))
                }
            }
        }
    }
}

/// Boundary end positions inside the window, each carrying its phrase index.
#[derive(Clone, Debug, Default)]
pub struct BoundaryIndex {
    ends: BTreeMap<u64, u64>,
    // number of phrases ending before the window start (stable for a phase)
    before: u64,
}

impl BoundaryIndex {
    pub fn new(before: u64) -> Self {
        Self {
            ends: BTreeMap::new(),
            before,
        }
    }

    pub fn insert(&mut self, end: u64, phrase: u64) {
        self.ends.insert(end, phrase);
    }

    pub fn remove(&mut self, end: u64) {
        self.ends.remove(&end);
    }

    /// `max{k : |f_1 … f_k| <= x}`.
    pub fn pred_query(&self, x: u64) -> u64 {
        self.ends
            .range(..=x)
            .next_back()
            .map(|(_, &k)| k)
            .unwrap_or(self.before)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.ends.iter().map(|(&e, &k)| (e, k))
    }

    pub fn len(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }
}

/// `lens[j]` and `lnks[j]` for absolute positions `j` in `[start, start + len)`.
/// A `lens` value of 0 means "never computed"; a `lnks` value of 0 is nil.
#[derive(Clone, Debug, Default)]
pub struct RecentArrays {
    start: u64,
    lens: Vec<u32>,
    lnks: Vec<u32>,
}

impl RecentArrays {
    pub fn new(start: u64, end: u64) -> Self {
        let len = (end + 1).saturating_sub(start) as usize;
        Self {
            start,
            lens: vec![0; len],
            lnks: vec![0; len],
        }
    }

    /// A new range, keeping every value of `self` that falls inside it.
    pub fn rebased(&self, start: u64, end: u64) -> Self {
        let mut next = Self::new(start, end);
        for j in start.max(self.start)..=end.min(self.end()) {
            let (a, b) = ((j - start) as usize, (j - self.start) as usize);
            next.lens[a] = self.lens[b];
            next.lnks[a] = self.lnks[b];
        }
        next
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn end(&self) -> u64 {
        self.start + self.lens.len() as u64 - 1
    }

    pub fn covers(&self, pos: u64) -> bool {
        pos >= self.start && pos < self.start + self.lens.len() as u64
    }

    #[inline]
    fn idx(&self, pos: u64) -> usize {
        assert!(self.covers(pos), "position {pos} outside recent range");
        (pos - self.start) as usize
    }

    #[inline]
    pub fn lens(&self, pos: u64) -> u32 {
        self.lens[self.idx(pos)]
    }

    #[inline]
    pub fn lnks(&self, pos: u64) -> u32 {
        self.lnks[self.idx(pos)]
    }

    #[inline]
    pub fn set_lens(&mut self, pos: u64, v: u32) {
        let i = self.idx(pos);
        self.lens[i] = v;
    }

    #[inline]
    pub fn set_lnks(&mut self, pos: u64, v: u32) {
        let i = self.idx(pos);
        self.lnks[i] = v;
    }
}
