//! Compressed trie over reversed boundary prefixes `reverse(f_1 … f_j)`.
//!
//! Edge labels are never stored: a node knows its string depth `len` and a
//! boundary `phr` below it, and any character of its string is recovered by
//! suffix retrieval from the phrase array. Navigation uses fat binary search
//! over the `nav` table keyed by `(p_v, hash(v.str[..p_v]))`, where `p_v` is
//! the 2-fattest number in `(v.par.len, v.len]`.
//!
//! `nav` only holds entries with `p_v <= cap`. Lookups never ask for a
//! prefix longer than the pattern, so entries beyond the longest pattern the
//! parser can produce are dead weight; leaves deep in the text would
//! otherwise need O(p_v) retrieval each.
//!
//! A stored string may be a proper prefix of another (e.g. `a` and `aa` for
//! the text `aa`), so a node can be a *terminal* that also has children.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use crate::fingerprint::{FingerprintContext, Fp, ReverseAccumulator};
use crate::phrase::{Phrase, SuffixIter};

pub type NodeId = u32;
pub const ROOT: NodeId = 0;
const NIL: NodeId = u32::MAX;

/// `x` with its `i` lowest bits cleared.
#[inline]
pub fn rst(x: u64, i: u32) -> u64 {
    if i >= 64 {
        0
    } else {
        x & !((1u64 << i) - 1)
    }
}

/// `rst(hi, i)` for the maximal `i` with `rst(hi, i) > lo`; requires `lo < hi`.
#[inline]
pub fn fattest(lo: u64, hi: u64) -> u64 {
    debug_assert!(lo < hi);
    let i = 63 - (lo ^ hi).leading_zeros();
    rst(hi, i)
}

/// Hasher for keys that are already uniformly distributed fingerprints.
#[derive(Default)]
struct FpHasher(u64);

impl Hasher for FpHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ b as u64).wrapping_mul(0x100_0000_01b3);
        }
    }

    fn write_u64(&mut self, v: u64) {
        self.0 = (self.0.rotate_left(29) ^ v).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
}

type NavMap = HashMap<(u64, u64), NodeId, BuildHasherDefault<FpHasher>>;

/// Tiny linear-probing map from a byte to a child, with backward-shift
/// deletion. Slots hold `(byte << 32) | node`, empty is `u64::MAX`.
#[derive(Clone, Debug, Default)]
struct ChildMap {
    slots: Vec<u64>,
    count: u32,
}

const EMPTY: u64 = u64::MAX;

impl ChildMap {
    fn len(&self) -> usize {
        self.count as usize
    }

    #[inline]
    fn home(&self, c: u8) -> usize {
        (c as usize).wrapping_mul(0x9e37) >> 3 & (self.slots.len() - 1)
    }

    fn get(&self, c: u8) -> Option<NodeId> {
        if self.slots.is_empty() {
            return None;
        }
        let mask = self.slots.len() - 1;
        let mut i = self.home(c);
        loop {
            let s = self.slots[i];
            if s == EMPTY {
                return None;
            }
            if (s >> 32) as u8 == c {
                return Some(s as u32);
            }
            i = (i + 1) & mask;
        }
    }

    fn insert(&mut self, c: u8, node: NodeId) {
        if (self.count as usize + 1) * 4 > self.slots.len() * 3 {
            let old = std::mem::take(&mut self.slots);
            self.slots = vec![EMPTY; (old.len() * 2).max(2)];
            self.count = 0;
            for s in old.into_iter().filter(|&s| s != EMPTY) {
                self.insert((s >> 32) as u8, s as u32);
            }
        }
        let mask = self.slots.len() - 1;
        let mut i = self.home(c);
        loop {
            let s = self.slots[i];
            if s == EMPTY {
                self.slots[i] = (c as u64) << 32 | node as u64;
                self.count += 1;
                return;
            }
            if (s >> 32) as u8 == c {
                self.slots[i] = (c as u64) << 32 | node as u64;
                return;
            }
            i = (i + 1) & mask;
        }
    }

    fn remove(&mut self, c: u8) {
        if self.slots.is_empty() {
            return;
        }
        let mask = self.slots.len() - 1;
        let mut i = self.home(c);
        loop {
            let s = self.slots[i];
            if s == EMPTY {
                return;
            }
            if (s >> 32) as u8 == c {
                break;
            }
            i = (i + 1) & mask;
        }
        self.slots[i] = EMPTY;
        self.count -= 1;
        let mut j = (i + 1) & mask;
        while self.slots[j] != EMPTY {
            let s = self.slots[j];
            let h = self.home((s >> 32) as u8);
            // move s back to the hole when its home is not in (i, j]
            let in_range = if i <= j { h > i && h <= j } else { h > i || h <= j };
            if !in_range {
                self.slots[i] = s;
                self.slots[j] = EMPTY;
                i = j;
            }
            j = (j + 1) & mask;
        }
    }

    fn iter(&self) -> impl Iterator<Item = (u8, NodeId)> + '_ {
        self.slots
            .iter()
            .filter(|&&s| s != EMPTY)
            .map(|&s| ((s >> 32) as u8, s as u32))
    }

    fn single(&self) -> Option<(u8, NodeId)> {
        if self.count == 1 {
            self.iter().next()
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
struct Node {
    len: u64,
    /// Smallest boundary index stored in the subtree.
    phr: u64,
    parent: NodeId,
    /// First character below the parent, i.e. `str[parent.len]`.
    key: u8,
    /// Boundary stored exactly here, 0 if none.
    leaf_of: u64,
    nav_p: u64,
    nav_h: Option<Fp>,
    children: ChildMap,
    live: bool,
}

impl Node {
    fn root() -> Self {
        Self {
            len: 0,
            phr: 0,
            parent: NIL,
            key: 0,
            leaf_of: 0,
            nav_p: 0,
            nav_h: None,
            children: ChildMap::default(),
            live: true,
        }
    }
}

/// A pattern for [`Trie::approx_find`]: random access to characters and
/// O(1) fingerprints of prefixes.
pub trait Pattern {
    fn len(&self) -> usize;
    fn at(&self, i: usize) -> u8;
    /// `hash(pat[..p])`.
    fn prefix_hash(&self, p: usize) -> Fp;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A materialized pattern; fingerprints are computed on demand.
pub struct SlicePattern<'a> {
    pub bytes: &'a [u8],
    pub ctx: &'a FingerprintContext,
}

impl Pattern for SlicePattern<'_> {
    fn len(&self) -> usize {
        self.bytes.len()
    }

    fn at(&self, i: usize) -> u8 {
        self.bytes[i]
    }

    fn prefix_hash(&self, p: usize) -> Fp {
        self.ctx.hash(&self.bytes[..p])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertOutcome {
    Inserted(NodeId),
    /// The new string was already fully represented; only possible when
    /// phrase lengths are capped.
    Skipped,
}

pub struct Trie {
    nodes: Vec<Node>,
    free: Vec<NodeId>,
    nav: NavMap,
    leaves: Vec<NodeId>,
    cap: u64,
    stored: usize,
    peak_nodes: usize,
    scratch: Vec<u8>,
    stack: Vec<(u64, u64)>,
}

impl Trie {
    /// `nav_cap` bounds the prefix lengths that get a `nav` entry.
    pub fn new(nav_cap: u64) -> Self {
        Self {
            nodes: vec![Node::root()],
            free: Vec::new(),
            nav: NavMap::default(),
            leaves: vec![NIL],
            cap: nav_cap,
            stored: 0,
            peak_nodes: 1,
            scratch: Vec::new(),
            stack: Vec::new(),
        }
    }

    pub fn nav_cap(&self) -> u64 {
        self.cap
    }

    /// Number of live nodes including the root.
    pub fn node_count(&self) -> usize {
        self.nodes.len() - self.free.len()
    }

    pub fn peak_node_count(&self) -> usize {
        self.peak_nodes
    }

    pub fn stored(&self) -> usize {
        self.stored
    }

    pub fn nav_len(&self) -> usize {
        self.nav.len()
    }

    pub fn len(&self, v: NodeId) -> u64 {
        self.nodes[v as usize].len
    }

    pub fn phr(&self, v: NodeId) -> u64 {
        self.nodes[v as usize].phr
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        let p = self.nodes[v as usize].parent;
        (p != NIL).then_some(p)
    }

    pub fn child(&self, v: NodeId, c: u8) -> Option<NodeId> {
        self.nodes[v as usize].children.get(c)
    }

    /// The node storing `reverse(f_1 … f_j)`, if present.
    pub fn leaf(&self, j: u64) -> Option<NodeId> {
        match self.leaves.get(j as usize) {
            Some(&v) if v != NIL => Some(v),
            _ => None,
        }
    }

    pub fn contains(&self, j: u64) -> bool {
        self.leaf(j).is_some()
    }

    /// Indices of all stored boundaries, ascending.
    pub fn stored_boundaries(&self) -> Vec<u64> {
        (1..self.leaves.len() as u64).filter(|&j| self.contains(j)).collect()
    }

    fn alloc(&mut self, node: Node) -> NodeId {
        let id = if let Some(id) = self.free.pop() {
            self.nodes[id as usize] = node;
            id
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as NodeId
        };
        self.peak_nodes = self.peak_nodes.max(self.node_count());
        id
    }

    fn release(&mut self, v: NodeId) {
        let n = &mut self.nodes[v as usize];
        n.live = false;
        n.children = ChildMap::default();
        self.free.push(v);
    }

    /// `hash(v.str[..p])` by retrieving the last `p` characters of
    /// `f_1 … f_{v.phr}`.
    fn retrieve_hash(&mut self, phrases: &[Phrase], phr: u64, p: u64, ctx: &FingerprintContext) -> Fp {
        let mut acc = ReverseAccumulator::new(ctx);
        let mut it = SuffixIter::with_stack(phrases, phr, p, std::mem::take(&mut self.stack));
        for b in it.by_ref() {
            acc.push(b);
        }
        self.stack = it.into_stack();
        acc.finish()
    }

    fn uninstall_nav(&mut self, v: NodeId) {
        let n = &mut self.nodes[v as usize];
        if let Some(h) = n.nav_h.take() {
            let key = (n.nav_p, h.0);
            if self.nav.get(&key) == Some(&v) {
                self.nav.remove(&key);
            }
        }
    }

    fn install_nav(&mut self, v: NodeId, p: u64, h: Fp) {
        let n = &mut self.nodes[v as usize];
        n.nav_p = p;
        n.nav_h = Some(h);
        self.nav.insert((p, h.0), v);
    }

    /// Raises the nav cap and installs the entries that became eligible.
    pub fn set_nav_cap(&mut self, phrases: &[Phrase], cap: u64, ctx: &FingerprintContext) {
        if cap <= self.cap {
            self.cap = cap;
            for v in 1..self.nodes.len() as NodeId {
                let n = &self.nodes[v as usize];
                if n.live && n.nav_p > cap {
                    self.uninstall_nav(v);
                }
            }
            return;
        }
        self.cap = cap;
        for v in 1..self.nodes.len() as NodeId {
            let n = &self.nodes[v as usize];
            if n.live && n.nav_h.is_none() && n.nav_p <= cap {
                let (phr, p) = (n.phr, n.nav_p);
                let h = self.retrieve_hash(phrases, phr, p, ctx);
                self.install_nav(v, p, h);
            }
        }
    }

    /// Fat binary search for the longest prefix of `pat` represented in the
    /// trie. Returns the root when no non-empty prefix is present.
    pub fn approx_find<P: Pattern + ?Sized>(&self, pat: &P) -> NodeId {
        let n = pat.len();
        if n == 0 {
            return ROOT;
        }
        let top = usize::BITS - (n - 1).leading_zeros(); // ceil(log2 n)
        let mut p = 0u64;
        let mut v = ROOT;
        for i in (0..=top).rev() {
            let q = p + (1u64 << i);
            if self.nodes[v as usize].len >= q {
                p = q;
            } else if q <= n as u64 {
                let h = pat.prefix_hash(q as usize);
                if let Some(&u) = self.nav.get(&(q, h.0)) {
                    p = q;
                    v = u;
                }
            }
        }
        let vl = self.nodes[v as usize].len;
        if vl < n as u64 {
            if let Some(c) = self.child(v, pat.at(vl as usize)) {
                v = c;
            }
        }
        v
    }

    /// Inserts `reverse(f_1 … f_j)`, whose length is `end = |f_1 … f_j|`.
    /// Boundaries must be inserted in increasing order of `j`. If `f_j` is a
    /// suffix of an already stored prefix (possible only for capped phrases)
    /// nothing is inserted.
    pub fn insert_boundary(
        &mut self,
        phrases: &[Phrase],
        j: u64,
        end: u64,
        ctx: &FingerprintContext,
    ) -> InsertOutcome {
        debug_assert!(!self.contains(j));
        let flen = phrases[j as usize - 1].len;

        // reverse(f_j)
        let mut scratch = std::mem::take(&mut self.scratch);
        scratch.clear();
        let mut it = SuffixIter::with_stack(phrases, j, flen, std::mem::take(&mut self.stack));
        scratch.extend(it.by_ref());
        self.stack = it.into_stack();

        // blind Patricia descent along reverse(f_j)
        let mut v = ROOT;
        loop {
            let vl = self.nodes[v as usize].len;
            if vl >= flen {
                break;
            }
            match self.child(v, scratch[vl as usize]) {
                Some(c) => v = c,
                None => break,
            }
        }

        // exact common prefix with v's string, bounded by |f_j|
        let mut lcs = 0u64;
        let mut mismatch = None;
        if v != ROOT {
            let phr = self.nodes[v as usize].phr;
            let avail = self.nodes[self.leaves[phr as usize] as usize].len;
            let k = flen.min(avail);
            let mut it = SuffixIter::with_stack(phrases, phr, k, std::mem::take(&mut self.stack));
            for b in it.by_ref() {
                if b != scratch[lcs as usize] {
                    mismatch = Some(b);
                    break;
                }
                lcs += 1;
            }
            self.stack = it.into_stack();
        }
        if lcs >= flen {
            self.scratch = scratch;
            return InsertOutcome::Skipped;
        }

        // deepest node on the root..v path with len <= lcs
        let mut below = NIL;
        let mut u = v;
        while self.nodes[u as usize].len > lcs {
            below = u;
            u = self.nodes[u as usize].parent;
        }

        let attach = if self.nodes[u as usize].len == lcs {
            u
        } else {
            // split the edge u -> below at depth lcs
            let c = below;
            let c_key = self.nodes[c as usize].key;
            let w = self.alloc(Node {
                len: lcs,
                phr: self.nodes[c as usize].phr,
                parent: u,
                key: c_key,
                leaf_of: 0,
                nav_p: 0,
                nav_h: None,
                children: ChildMap::default(),
                live: true,
            });
            let split_key = mismatch.expect("split below a mismatch");
            self.nodes[u as usize].children.insert(c_key, w);
            self.nodes[w as usize].children.insert(split_key, c);
            self.nodes[c as usize].parent = w;
            self.nodes[c as usize].key = split_key;

            let pw = fattest(self.nodes[u as usize].len, lcs);
            self.nodes[w as usize].nav_p = pw;
            let old_pc = self.nodes[c as usize].nav_p;
            if old_pc <= lcs {
                // w takes over c's old point; c moves to a new one
                self.uninstall_nav(c);
                let c_len = self.nodes[c as usize].len;
                let pc = fattest(lcs, c_len);
                self.nodes[c as usize].nav_p = pc;
                if pc <= self.cap {
                    let phr = self.nodes[c as usize].phr;
                    let h = self.retrieve_hash(phrases, phr, pc, ctx);
                    self.install_nav(c, pc, h);
                }
            }
            if pw <= self.cap {
                let h = ctx.hash(&scratch[..pw as usize]);
                self.install_nav(w, pw, h);
            }
            w
        };

        let key = scratch[lcs as usize];
        let x = self.alloc(Node {
            len: end,
            phr: j,
            parent: attach,
            key,
            leaf_of: j,
            nav_p: 0,
            nav_h: None,
            children: ChildMap::default(),
            live: true,
        });
        self.nodes[attach as usize].children.insert(key, x);
        let px = fattest(self.nodes[attach as usize].len, end);
        self.nodes[x as usize].nav_p = px;
        if px <= self.cap {
            let h = if px <= flen {
                ctx.hash(&scratch[..px as usize])
            } else {
                self.retrieve_hash(phrases, j, px, ctx)
            };
            self.install_nav(x, px, h);
        }

        if self.leaves.len() <= j as usize {
            self.leaves.resize(j as usize + 1, NIL);
        }
        self.leaves[j as usize] = x;
        self.stored += 1;
        self.scratch = scratch;
        InsertOutcome::Inserted(x)
    }

    fn min_phr(&self, v: NodeId) -> u64 {
        let n = &self.nodes[v as usize];
        let mut m = if n.leaf_of != 0 { n.leaf_of } else { u64::MAX };
        for (_, c) in n.children.iter() {
            m = m.min(self.nodes[c as usize].phr);
        }
        m
    }

    /// Removes `reverse(f_1 … f_j)`; unary non-terminal nodes left behind are
    /// spliced out. Returns false if the boundary was not stored.
    pub fn delete_boundary(&mut self, j: u64) -> bool {
        let Some(x) = self.leaf(j) else {
            debug_assert!(false, "deleting boundary {j} that is not stored");
            return false;
        };
        self.leaves[j as usize] = NIL;
        self.stored -= 1;
        self.nodes[x as usize].leaf_of = 0;

        let mut v = x;
        if self.nodes[x as usize].children.len() == 0 {
            let parent = self.nodes[x as usize].parent;
            let key = self.nodes[x as usize].key;
            self.uninstall_nav(x);
            self.nodes[parent as usize].children.remove(key);
            self.release(x);
            v = parent;
        }

        // fix phr upward where it referred to j
        let mut a = v;
        while a != NIL && self.nodes[a as usize].phr == j {
            let m = self.min_phr(a);
            self.nodes[a as usize].phr = if m == u64::MAX { 0 } else { m };
            a = self.nodes[a as usize].parent;
        }

        if v != ROOT && self.nodes[v as usize].leaf_of == 0 {
            if let Some((_, c)) = self.nodes[v as usize].children.single() {
                self.splice(v, c);
            }
        }
        true
    }

    /// Replaces unary node `w` by its only child `c`.
    fn splice(&mut self, w: NodeId, c: NodeId) {
        let parent = self.nodes[w as usize].parent;
        let key = self.nodes[w as usize].key;
        let (pw, hw) = (self.nodes[w as usize].nav_p, self.nodes[w as usize].nav_h);
        self.uninstall_nav(w);
        self.nodes[parent as usize].children.insert(key, c);
        self.nodes[c as usize].parent = parent;
        self.nodes[c as usize].key = key;
        self.release(w);

        // the fattest number of the merged interval is one of the two old ones
        let plen = self.nodes[parent as usize].len;
        let p = fattest(plen, self.nodes[c as usize].len);
        if p != self.nodes[c as usize].nav_p {
            debug_assert_eq!(p, pw);
            self.uninstall_nav(c);
            self.nodes[c as usize].nav_p = p;
            if let Some(h) = hw {
                self.install_nav(c, p, h);
            }
        }
    }

    /// Nearest common ancestor of the leaves for boundaries `a` and `b`,
    /// by climbing the deeper side.
    pub fn nca(&self, a: u64, b: u64) -> Option<NodeId> {
        let mut x = self.leaf(a)?;
        let mut y = self.leaf(b)?;
        while x != y {
            let (lx, ly) = (self.nodes[x as usize].len, self.nodes[y as usize].len);
            if lx >= ly {
                x = self.nodes[x as usize].parent;
            }
            if ly >= lx {
                y = self.nodes[y as usize].parent;
            }
        }
        Some(x)
    }

    /// The highest ancestor-or-self of `v` whose string depth is at least
    /// `min_len`; every leaf below it shares `min_len` characters with `v`.
    pub fn highest_with_len(&self, v: NodeId, min_len: u64) -> NodeId {
        let mut u = v;
        loop {
            let p = self.nodes[u as usize].parent;
            if p == NIL || self.nodes[p as usize].len < min_len {
                return u;
            }
            u = p;
        }
    }

    /// String depth of `nca(a, b)`, or `None` if either boundary is absent.
    pub fn nca_len(&self, a: u64, b: u64) -> Option<u64> {
        self.nca(a, b).map(|v| self.len(v))
    }

    /// Structural audit. `ends[k]` must be `|f_1 … f_k|` (`ends[0] = 0`).
    /// Returns a description of the first violation found.
    pub fn audit(&self, phrases: &[Phrase], ends: &[u64], ctx: &FingerprintContext) -> Result<(), String> {
        self.audit_with_text(phrases, ends, ctx, None)
    }

    /// [`Trie::audit`], reading edge keys from `text` (the decoded prefix,
    /// 0-based) instead of by retrieval when it is available.
    pub fn audit_with_text(
        &self,
        phrases: &[Phrase],
        ends: &[u64],
        ctx: &FingerprintContext,
        text: Option<&[u8]>,
    ) -> Result<(), String> {
        let mut installed = 0usize;
        let mut leaves_seen = 0usize;
        let mut live = 0usize;
        for (id, n) in self.nodes.iter().enumerate() {
            if !n.live {
                continue;
            }
            live += 1;
            let id = id as NodeId;
            for (c, ch) in n.children.iter() {
                let cn = &self.nodes[ch as usize];
                if !cn.live || cn.parent != id || cn.key != c {
                    return Err(format!("child link {id} -[{c}]-> {ch} inconsistent"));
                }
                if cn.len <= n.len {
                    return Err(format!("child {ch} not deeper than parent {id}"));
                }
            }
            if n.leaf_of != 0 {
                leaves_seen += 1;
                if self.leaf(n.leaf_of) != Some(id) {
                    return Err(format!("node {id} claims boundary {} but N disagrees", n.leaf_of));
                }
                if n.len != ends[n.leaf_of as usize] {
                    return Err(format!("leaf {id} has len {} but boundary ends at {}", n.len, ends[n.leaf_of as usize]));
                }
            }
            if id == ROOT {
                continue;
            }
            if n.leaf_of == 0 && n.children.len() < 2 {
                return Err(format!("non-terminal node {id} has {} children", n.children.len()));
            }
            let want_phr = self.min_phr(id);
            if n.phr != want_phr {
                return Err(format!("node {id} phr {} but subtree minimum is {want_phr}", n.phr));
            }
            // str[parent.len] must equal the edge key
            let plen = self.nodes[n.parent as usize].len;
            let c = match text {
                Some(t) => Some(t[(ends[n.phr as usize] - plen - 1) as usize]),
                None => SuffixIter::new(phrases, n.phr, plen + 1).last(),
            };
            if c != Some(n.key) {
                return Err(format!("node {id} key {} but string has {:?}", n.key, c));
            }
            let p = fattest(plen, n.len);
            if n.nav_p != p {
                return Err(format!("node {id} p_v {} but should be {p}", n.nav_p));
            }
            match n.nav_h {
                Some(h) => {
                    if p > self.cap {
                        return Err(format!("node {id} has nav entry beyond cap"));
                    }
                    let mut acc = ReverseAccumulator::new(ctx);
                    SuffixIter::new(phrases, n.phr, p).for_each(|b| acc.push(b));
                    if acc.finish() != h {
                        return Err(format!("node {id} nav hash is stale"));
                    }
                    if self.nav.get(&(p, h.0)) != Some(&id) {
                        return Err(format!("nav does not map ({p}, h) to node {id}"));
                    }
                    installed += 1;
                }
                None if p <= self.cap => {
                    return Err(format!("node {id} lacks a nav entry (p_v = {p})"));
                }
                None => {}
            }
        }
        if installed != self.nav.len() {
            return Err(format!("nav has {} entries but {installed} nodes own one", self.nav.len()));
        }
        if leaves_seen != self.stored {
            return Err(format!("{leaves_seen} leaves but {} stored", self.stored));
        }
        if live > 2 * self.stored.max(1) {
            return Err(format!("{live} nodes for {} stored strings", self.stored));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phrase::Parsing;

    fn parse(s: &[u8]) -> Parsing {
        crate::oracle::lzend_bruteforce(s)
    }

    fn ends_of(p: &Parsing) -> Vec<u64> {
        let mut e = vec![0];
        for ph in p.phrases() {
            e.push(e.last().unwrap() + ph.len);
        }
        e
    }

    fn build(s: &[u8], cap: u64, ctx: &FingerprintContext) -> (Parsing, Vec<u64>, Trie) {
        let p = parse(s);
        let ends = ends_of(&p);
        let mut t = Trie::new(cap);
        // the final phrase may be a suffix of an earlier prefix
        for j in 1..p.z() as u64 {
            assert!(matches!(
                t.insert_boundary(p.phrases(), j, ends[j as usize], ctx),
                InsertOutcome::Inserted(_)
            ));
            t.audit(p.phrases(), &ends, ctx).unwrap();
        }
        (p, ends, t)
    }

    #[test]
    fn rst_examples() {
        assert_eq!(rst(13, 0), 13);
        assert_eq!(rst(0b10110, 2), 0b10100);
        assert_eq!(rst(13, 3), 8);
        assert_eq!(rst(5, 64), 0);
    }

    #[test]
    fn fattest_matches_definition() {
        for lo in 0..70u64 {
            for hi in lo + 1..140 {
                let want = (0..64).map(|i| rst(hi, i)).rfind(|&x| x > lo).unwrap();
                assert_eq!(fattest(lo, hi), want, "({lo}, {hi}]");
            }
        }
    }

    #[test]
    fn child_map_insert_remove() {
        let mut m = ChildMap::default();
        for c in 0..=255u8 {
            m.insert(c, c as u32 * 3);
        }
        assert_eq!(m.len(), 256);
        for c in (0..=255u8).step_by(2) {
            m.remove(c);
        }
        for c in 0..=255u8 {
            assert_eq!(m.get(c), (c % 2 == 1).then_some(c as u32 * 3));
        }
    }

    #[test]
    fn empty_trie_finds_root() {
        let ctx = FingerprintContext::from_seed(1);
        let t = Trie::new(64);
        assert_eq!(t.approx_find(&SlicePattern { bytes: b"ab", ctx: &ctx }), ROOT);
    }

    #[test]
    fn single_leaf_descent() {
        let ctx = FingerprintContext::from_seed(1);
        let (_, _, t) = build(b"ab", 64, &ctx);
        assert_eq!(t.node_count(), 2);
        assert_eq!(t.nav_len(), 1);
        let v = t.approx_find(&SlicePattern { bytes: b"ab", ctx: &ctx });
        assert_eq!(t.leaf(1), Some(v));
    }

    #[test]
    fn small_example_boundaries() {
        let ctx = FingerprintContext::from_seed(2);
        let (p, _, t) = build(b"ababaaaaaac", 1 << 20, &ctx);
        assert_eq!(p.z(), 5);
        assert_eq!(t.stored(), 4);
        assert!(t.node_count() <= 2 * 5);
    }

    #[test]
    fn terminal_prefix_strings() {
        // a.aa.b: "a" is a prefix of reverse("aaa")
        let ctx = FingerprintContext::from_seed(3);
        let (_, _, t) = build(b"aaab", 64, &ctx);
        let a = t.leaf(1).unwrap();
        let aaa = t.leaf(2).unwrap();
        assert_eq!(t.parent(aaa), Some(a));
        assert_eq!(t.nca_len(1, 2), Some(1));
        assert_eq!(t.nca(2, 2), Some(aaa));
    }

    #[test]
    fn delete_then_reinsert_restores_state() {
        let ctx = FingerprintContext::from_seed(4);
        let s = b"abaababaabaababaababa";
        let (p, ends, mut t) = build(s, 64, &ctx);
        let z = p.z() as u64 - 1;
        let snapshot = |t: &Trie| {
            let mut nav: Vec<_> = t.nav.iter().map(|(&k, &v)| (k, t.len(v), t.phr(v))).collect();
            nav.sort();
            (t.node_count(), nav)
        };
        let before = snapshot(&t);
        assert!(t.delete_boundary(z));
        t.audit(p.phrases(), &ends, &ctx).unwrap();
        t.insert_boundary(p.phrases(), z, ends[z as usize], &ctx);
        t.audit(p.phrases(), &ends, &ctx).unwrap();
        assert_eq!(snapshot(&t), before);
    }

    #[test]
    fn delete_all_leaves_bare_root() {
        let ctx = FingerprintContext::from_seed(5);
        let (p, ends, mut t) = build(b"abbabbbaaabab", 64, &ctx);
        for j in (1..p.z() as u64).rev() {
            t.delete_boundary(j);
            t.audit(p.phrases(), &ends, &ctx).unwrap();
        }
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.nav_len(), 0);
    }

    #[test]
    fn nca_distinct_first_chars_is_root() {
        let ctx = FingerprintContext::from_seed(6);
        // a.b.b: reversed prefixes "a" and "ba"
        let (_, _, t) = build(b"abb", 64, &ctx);
        assert_eq!(t.nca(1, 2), Some(ROOT));
        assert_eq!(t.nca(1, 9), None);
    }

    fn rev_prefix(s: &[u8], end: u64) -> Vec<u8> {
        s[..end as usize].iter().rev().copied().collect()
    }

    fn common(a: &[u8], b: &[u8]) -> usize {
        a.iter().zip(b).take_while(|(x, y)| x == y).count()
    }

    #[test]
    fn approx_find_satisfies_contract() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let ctx = FingerprintContext::from_seed(12);
        for case in 0..500 {
            let len = rng.gen_range(2..80);
            let s = crate::oracle::random_text(&mut rng, len, [2, 3, 4][case % 3]);
            let (p, ends, t) = build(&s, 1 << 20, &ctx);
            let stored: Vec<Vec<u8>> = (1..p.z() as u64).map(|j| rev_prefix(&s, ends[j as usize])).collect();
            for _ in 0..100 {
                let pat: Vec<u8> = if rng.gen_bool(0.5) {
                    let b = rng.gen_range(1..=s.len());
                    let a = rng.gen_range(0..b);
                    s[a..b].iter().rev().copied().collect()
                } else {
                    let l = rng.gen_range(1..20);
                    crate::oracle::random_text(&mut rng, l, 3)
                };
                let tl = stored.iter().map(|x| common(&pat, x)).max().unwrap_or(0) as u64;
                let v = t.approx_find(&SlicePattern { bytes: &pat, ctx: &ctx });
                if tl == 0 {
                    assert_eq!(v, ROOT, "{s:?} {pat:?}");
                    continue;
                }
                let vstr = rev_prefix(&s, ends[t.phr(v) as usize]);
                assert!(common(&vstr, &pat) as u64 >= tl, "t not a prefix of v.str");
                let par = t.parent(v).unwrap();
                let ok = t.len(par) < tl || t.parent(par).is_some_and(|g| t.len(g) < tl);
                assert!(ok, "depth contract violated for {s:?} {pat:?}");
            }
        }
    }

    #[test]
    fn nca_matches_common_suffix() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let ctx = FingerprintContext::from_seed(14);
        for _ in 0..200 {
            let len = rng.gen_range(2..120);
            let s = crate::oracle::random_text(&mut rng, len, 2);
            let (p, ends, t) = build(&s, 64, &ctx);
            for a in 1..p.z() as u64 {
                for b in 1..p.z() as u64 {
                    let want = common(&rev_prefix(&s, ends[a as usize]), &rev_prefix(&s, ends[b as usize]));
                    assert_eq!(t.nca_len(a, b), Some(want as u64));
                }
            }
        }
    }

    #[test]
    fn interleaved_insert_delete_keeps_audit() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(15);
        let ctx = FingerprintContext::from_seed(16);
        for _ in 0..100 {
            let len = rng.gen_range(2..150);
            let s = crate::oracle::random_text(&mut rng, len, 3);
            let p = crate::oracle::lzend_bruteforce(&s);
            let ends = ends_of(&p);
            let cap = [4, 16, 1 << 20][rng.gen_range(0..3)];
            let mut t = Trie::new(cap);
            let mut top = 0u64;
            for _ in 0..3 * p.z() {
                if top + 1 < p.z() as u64 && (top == 0 || rng.gen_bool(0.65)) {
                    top += 1;
                    t.insert_boundary(p.phrases(), top, ends[top as usize], &ctx);
                } else if top > 0 {
                    t.delete_boundary(top);
                    top -= 1;
                }
                t.audit(p.phrases(), &ends, &ctx).unwrap();
            }
            let wider = cap * 4;
            t.set_nav_cap(p.phrases(), wider, &ctx);
            t.audit(p.phrases(), &ends, &ctx).unwrap();
        }
    }
}
