//! The incremental LZ-End parser.
//!
//! Input is consumed in phases of `ℓ` characters. A phase starting after
//! `start` processed characters keeps the window `s[start - 2ℓ ..= start + ℓ]`
//! (clamped), the recent `lens`/`lnks` arrays, the mark tree over phrase ends
//! and the boundary index; the trie holds the reversed prefixes ending at
//! every boundary `k` with `|f_1 … f_{k-1}| <= start - ℓ`.
//!
//! In adaptive mode `ℓ` starts at 8 and is multiplied by 4 as soon as a
//! phrase of length `ℓ / 2` appears, which makes the length guards inert and
//! the output the exact LZ-End parsing (barring fingerprint collisions).

use std::collections::HashMap;
use std::io::{ErrorKind, Read};

use crate::error::{Error, Result};
use crate::fingerprint::{FingerprintContext, Fp};
use crate::phrase::{Parsing, Phrase, SuffixIter};
use crate::trie::{InsertOutcome, Pattern, Trie};
use crate::window::{BoundaryIndex, MarkTree, RecentArrays, WindowIndex};

pub const INITIAL_ELL: u64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Phrases never exceed `ell`; one forward pass over the input.
    Fixed { ell: u64 },
    /// Exact parsing; `ℓ` grows as needed.
    Adaptive,
}

impl Mode {
    pub fn fixed(ell: u64) -> Result<Self> {
        if ell < INITIAL_ELL || !ell.is_power_of_two() || ell > 1 << 30 {
            return Err(Error::InvalidEll(ell));
        }
        Ok(Mode::Fixed { ell })
    }
}

/// How the phrase sequence changed when one character was appended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// The last two phrases and the new character became one phrase.
    MergeTwo,
    /// The new character extended the last phrase.
    Extend,
    /// The new character started a phrase of length 1.
    NewPhrase,
}

/// Reported to the observer after every character.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepEvent {
    /// Length of the prefix parsed so far.
    pub m: u64,
    /// Number of phrases of that prefix.
    pub z: usize,
    pub last_len: u64,
    pub kind: StepKind,
    /// The source was found through the window rather than the trie.
    pub via_window: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub n: u64,
    pub phases: u64,
    pub growths: u32,
    pub final_ell: u64,
    pub peak_trie_nodes: usize,
    pub peak_window: usize,
    pub bytes_read: u64,
}

#[derive(Clone, Debug)]
pub struct ParseOutcome {
    pub parsing: Parsing,
    pub stats: ParseStats,
    /// Structure audit violations; always empty unless auditing was enabled.
    pub audit_failures: Vec<String>,
}

type Observer<'o> = Box<dyn FnMut(&StepEvent) + 'o>;

/// Configurable entry point. [`parse_fixed`] and [`parse_adaptive`] cover
/// the common cases.
pub struct Parser<'o> {
    mode: Mode,
    ctx: FingerprintContext,
    audit: bool,
    observer: Option<Observer<'o>>,
}

impl<'o> Parser<'o> {
    pub fn new(mode: Mode, ctx: FingerprintContext) -> Self {
        Self {
            mode,
            ctx,
            audit: false,
            observer: None,
        }
    }

    /// Check every structure against its definition after each phase.
    /// Keeps a copy of the input and is slow; meant for tests.
    pub fn audit(mut self, on: bool) -> Self {
        self.audit = on;
        self
    }

    pub fn observe(mut self, f: impl FnMut(&StepEvent) + 'o) -> Self {
        self.observer = Some(Box::new(f));
        self
    }

    pub fn run<R: Read>(self, input: R) -> Result<ParseOutcome> {
        if let Mode::Fixed { ell } = self.mode {
            Mode::fixed(ell)?;
        }
        let mut engine = Engine::new(input, self.mode, self.ctx, self.audit, self.observer);
        engine.run()?;
        Ok(engine.finish())
    }
}

/// ℓ-restricted parsing in a single forward pass.
pub fn parse_fixed<R: Read>(input: R, ell: u64, ctx: &FingerprintContext) -> Result<Parsing> {
    Ok(Parser::new(Mode::fixed(ell)?, ctx.clone()).run(input)?.parsing)
}

/// The exact LZ-End parsing, with high probability.
pub fn parse_adaptive<R: Read>(input: R, ctx: &FingerprintContext) -> Result<Parsing> {
    Ok(Parser::new(Mode::Adaptive, ctx.clone()).run(input)?.parsing)
}

/// `reverse(s[b - len + 1 ..= b])` served from the window.
struct WindowPattern<'a> {
    win: &'a WindowIndex,
    ctx: &'a FingerprintContext,
    b: u64,
    len: usize,
}

impl Pattern for WindowPattern<'_> {
    fn len(&self) -> usize {
        self.len
    }

    fn at(&self, i: usize) -> u8 {
        self.win.at(self.b - i as u64)
    }

    fn prefix_hash(&self, p: usize) -> Fp {
        self.win.lhash_ending_at(self.b, p, self.ctx)
    }
}

/// Copies kept only in audit mode.
struct AuditState {
    text: Vec<u8>,
    // history[m] = length of the last phrase after m characters
    history: Vec<u64>,
    skipped: Vec<u64>,
    // every suffix (up to `max_len`) of the stored boundary prefixes
    suffixes: HashMap<Vec<u8>, u32>,
    max_len: usize,
    failures: Vec<String>,
}

impl AuditState {
    fn fail(&mut self, m: u64, what: String) {
        if self.failures.len() < 100 {
            self.failures.push(format!("at m = {m}: {what}"));
        }
    }

    fn add_suffixes(&mut self, end: u64, delta: i32) {
        let end = end as usize;
        for l in 1..=self.max_len.min(end) {
            let key = self.text[end - l..end].to_vec();
            let c = self.suffixes.entry(key).or_insert(0);
            *c = (*c as i32 + delta) as u32;
        }
    }
}

struct Engine<'o, R> {
    input: R,
    eof: bool,
    ctx: FingerprintContext,
    phrases: Vec<Phrase>,
    adaptive: bool,
    ell: u64,
    start: u64,
    end: u64,
    m: u64,
    win: WindowIndex,
    marks: MarkTree,
    bidx: BoundaryIndex,
    recent: RecentArrays,
    trie: Trie,
    // next boundary to insert and |f_1 … f_{trie_next - 1}|
    trie_next: u64,
    trie_cursor: u64,
    observer: Option<Observer<'o>>,
    audit: Option<AuditState>,
    stats: ParseStats,
}

impl<'o, R: Read> Engine<'o, R> {
    fn new(input: R, mode: Mode, ctx: FingerprintContext, audit: bool, observer: Option<Observer<'o>>) -> Self {
        let (adaptive, ell) = match mode {
            Mode::Fixed { ell } => (false, ell),
            Mode::Adaptive => (true, INITIAL_ELL),
        };
        let audit = audit.then(|| AuditState {
            text: Vec::new(),
            history: vec![0],
            skipped: Vec::new(),
            suffixes: HashMap::new(),
            max_len: ell as usize,
            failures: Vec::new(),
        });
        Self {
            input,
            eof: false,
            ctx,
            phrases: Vec::new(),
            adaptive,
            ell,
            start: 0,
            end: 0,
            m: 0,
            win: WindowIndex::build(Vec::new(), 1, &FingerprintContext::with_alpha(1)),
            marks: MarkTree::new(0),
            bidx: BoundaryIndex::new(0),
            recent: RecentArrays::new(1, 0),
            trie: Trie::new(2 * ell),
            trie_next: 1,
            trie_cursor: 0,
            observer,
            audit,
            stats: ParseStats::default(),
        }
    }

    fn finish(self) -> ParseOutcome {
        let mut parsing = Parsing::from_phrases(self.phrases);
        parsing.set_n(self.m);
        let mut stats = self.stats;
        stats.n = self.m;
        stats.final_ell = self.ell;
        stats.peak_trie_nodes = self.trie.peak_node_count();
        ParseOutcome {
            parsing,
            stats,
            audit_failures: self.audit.map(|a| a.failures).unwrap_or_default(),
        }
    }

    /// Appends input to `buf` until it holds `want` bytes or the input ends.
    fn read_into(&mut self, buf: &mut Vec<u8>, want: usize) -> Result<()> {
        let mut chunk = [0u8; 1 << 16];
        while !self.eof && buf.len() < want {
            let take = (want - buf.len()).min(chunk.len());
            match self.input.read(&mut chunk[..take]) {
                Ok(0) => self.eof = true,
                Ok(k) => {
                    buf.extend_from_slice(&chunk[..k]);
                    self.stats.bytes_read += k as u64;
                    if let Some(a) = self.audit.as_mut() {
                        a.text.extend_from_slice(&chunk[..k]);
                    }
                }
                Err(e) if e.kind() == ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        Ok(())
    }

    fn run(&mut self) -> Result<()> {
        self.begin_phase(0, 1, Vec::new())?;
        loop {
            if self.m == self.win.hi() || self.win.is_empty() {
                if self.m < self.end {
                    break; // input exhausted mid-phase
                }
                self.postprocess();
                let lo = 1.max(self.end.saturating_sub(2 * self.ell));
                let text = std::mem::replace(&mut self.win, WindowIndex::build(Vec::new(), 1, &self.ctx)).into_text();
                let old_lo = self.m + 1 - text.len() as u64;
                let head = text[(lo - old_lo) as usize..].to_vec();
                self.begin_phase(self.end, lo, head)?;
                if self.m == self.win.hi() {
                    break;
                }
            }
            self.step();
            let last = self.phrases.last().unwrap().len;
            if self.adaptive && last >= self.ell / 2 {
                self.grow()?;
            }
        }
        Ok(())
    }

    /// Sets up a phase over `s[start + 1 ..= start + ℓ]`; `head` holds
    /// `s[lo ..= start]` and possibly some already-read bytes after it.
    fn begin_phase(&mut self, start: u64, lo: u64, mut head: Vec<u8>) -> Result<()> {
        let ell = self.ell;
        self.start = start;
        self.end = start + ell;
        self.stats.phases += 1;
        let want = (self.end + 1 - lo) as usize;
        self.read_into(&mut head, want)?;
        self.ctx.ensure_powers(head.len() + 1);
        self.win = WindowIndex::build(head, lo, &self.ctx);
        self.stats.peak_window = self.stats.peak_window.max(self.win.len());

        self.marks = MarkTree::new(self.win.len());
        let mut entries = Vec::new();
        let mut e = self.m;
        let mut k = self.phrases.len() as u64;
        while k >= 1 && e >= lo {
            entries.push((e, k));
            e -= self.phrases[k as usize - 1].len;
            k -= 1;
        }
        self.bidx = BoundaryIndex::new(k);
        for (e, k) in entries {
            self.marks.mark(self.win.rank(e));
            self.bidx.insert(e, k);
        }
        self.recent = self.recent.rebased(1.max(start.saturating_sub(2 * ell)), self.end);
        Ok(())
    }

    fn last(&self) -> &Phrase {
        self.phrases.last().unwrap()
    }

    fn phrase(&self, k: u64) -> &Phrase {
        &self.phrases[k as usize - 1]
    }

    fn step(&mut self) {
        let m = self.m + 1;
        let z = self.phrases.len();
        let lz = if z >= 1 { self.last().len } else { 0 };
        let lz1 = if z >= 2 { self.phrases[z - 2].len } else { 0 };
        let len = lz + lz1;
        let p = if len == 0 {
            0
        } else {
            let pat = WindowPattern {
                win: &self.win,
                ctx: &self.ctx,
                b: m - 1,
                len: len as usize,
            };
            let v = self.trie.approx_find(&pat);
            self.trie.phr(v)
        };
        self.recent.set_lnks(m, 0);

        let ell = self.ell;
        let (kind, src, via_window) = if z >= 2 && len < ell && self.absorb_two(p, m, len) {
            self.recent.set_lnks(m, p as u32);
            (StepKind::MergeTwo, p, false)
        } else if let Some(ptr) = (z >= 2 && len < ell).then(|| self.absorb_two2(m, lz, len)).flatten() {
            (StepKind::MergeTwo, ptr, true)
        } else if z >= 1 && lz < ell && self.absorb_one(p, m) {
            self.recent.set_lnks(m, p as u32);
            (StepKind::Extend, p, false)
        } else if let Some(ptr) = (z >= 1 && lz < ell).then(|| self.absorb_one2(m, lz)).flatten() {
            (StepKind::Extend, ptr, true)
        } else {
            (StepKind::NewPhrase, 0, false)
        };

        match kind {
            StepKind::MergeTwo => {
                self.phrases.pop();
                self.phrases.last_mut().unwrap().len = len + 1;
            }
            StepKind::Extend => self.phrases.last_mut().unwrap().len += 1,
            StepKind::NewPhrase => self.phrases.push(Phrase::literal(0)),
        }
        let c = self.win.at(m);
        let flen = self.last().len;
        let hash = self.win.lhash_ending_at(m, flen as usize, &self.ctx);
        let last = self.phrases.last_mut().unwrap();
        last.c = c;
        last.hash = hash;
        last.lnk = if flen == 1 { 0 } else { src };
        self.recent.set_lens(m, flen as u32);
        self.m = m;
        self.update_recent(kind, m, lz);

        if let Some(a) = self.audit.as_mut() {
            a.history.push(flen);
        }
        if let Some(obs) = self.observer.as_mut() {
            obs(&StepEvent {
                m,
                z: self.phrases.len(),
                last_len: flen,
                kind,
                via_window,
            });
        }
    }

    fn nca_len(&self, a: u64, b: u64) -> Option<u64> {
        if a == 0 || b == 0 {
            return None;
        }
        self.trie.nca_len(a, b)
    }

    fn absorb_two(&self, p: u64, m: u64, len: u64) -> bool {
        self.common_part(p, m, len)
    }

    fn absorb_one(&self, p: u64, m: u64) -> bool {
        if p == 0 {
            return false;
        }
        let fz = *self.last();
        let fp = *self.phrase(p);
        if fp.len < fz.len {
            return self.common_part(p, m, fz.len);
        }
        if fp.c != fz.c {
            return false;
        }
        if fz.len == 1 {
            return true;
        }
        let l = self.recent.lnks(m - 1) as u64;
        if l == 0 {
            return false;
        }
        self.nca_len(l, fp.lnk).is_some_and(|a| a + 1 >= fz.len)
    }

    fn common_part(&self, p: u64, m: u64, len: u64) -> bool {
        if p == 0 {
            return false;
        }
        let fp = *self.phrase(p);
        if fp.len >= len || fp.hash != self.win.lhash_ending_at(m - 1, fp.len as usize, &self.ctx) {
            return false;
        }
        let pos = m - fp.len;
        if !self.recent.covers(pos) {
            return false;
        }
        let (lens, lnks) = (self.recent.lens(pos) as u64, self.recent.lnks(pos) as u64);
        if lens + fp.len != len + 1 || lnks == 0 {
            return false;
        }
        self.nca_len(lnks, p - 1).is_some_and(|a| a + fp.len >= len)
    }

    fn chk(&self, m: u64, len: u64) -> Option<u64> {
        let (ln, x) = self.win.marked_lcp(&self.marks, m - 1)?;
        if (ln as u64) < len {
            return None;
        }
        Some(self.bidx.pred_query(x))
    }

    fn absorb_one2(&self, m: u64, lz: u64) -> Option<u64> {
        self.chk(m, lz)
    }

    fn absorb_two2(&mut self, m: u64, lz: u64, len: u64) -> Option<u64> {
        // f_{z-1} itself may not serve as the source
        let e = m - lz - 1;
        let leaf = self.win.contains(e).then(|| self.win.rank(e));
        if let Some(l) = leaf {
            self.marks.unmark(l);
        }
        let r = self.chk(m, len);
        if let Some(l) = leaf {
            self.marks.mark(l);
        }
        r
    }

    fn set_mark(&mut self, pos: u64, on: bool) {
        if self.win.contains(pos) {
            let r = self.win.rank(pos);
            if on {
                self.marks.mark(r);
            } else {
                self.marks.unmark(r);
            }
        }
    }

    fn update_recent(&mut self, kind: StepKind, m: u64, old_lz: u64) {
        match kind {
            StepKind::MergeTwo => {
                let e1 = m - 1 - old_lz;
                self.set_mark(e1, false);
                self.set_mark(m - 1, false);
                self.bidx.remove(e1);
                self.bidx.remove(m - 1);
            }
            StepKind::Extend => {
                self.set_mark(m - 1, false);
                self.bidx.remove(m - 1);
            }
            StepKind::NewPhrase => {}
        }
        self.set_mark(m, true);
        self.bidx.insert(m, self.phrases.len() as u64);
    }

    /// End of a full phase: extend the trie, refresh `lnks`.
    fn postprocess(&mut self) {
        self.audit_phase_end();
        let limit = self.end - self.ell;
        let z = self.phrases.len() as u64;
        let mut inserted = Vec::new();
        while self.trie_next <= z && self.trie_cursor <= limit {
            let j = self.trie_next;
            let e = self.trie_cursor + self.phrase(j).len;
            match self.trie.insert_boundary(&self.phrases, j, e, &self.ctx) {
                InsertOutcome::Inserted(_) => {
                    inserted.push(e);
                    if let Some(a) = self.audit.as_mut() {
                        a.add_suffixes(e, 1);
                    }
                }
                InsertOutcome::Skipped => {
                    if let Some(a) = self.audit.as_mut() {
                        a.skipped.push(j);
                    }
                }
            }
            self.trie_cursor = e;
            self.trie_next += 1;
        }

        self.marks.clear();
        for &e in &inserted {
            self.set_mark(e, true);
        }
        let from = 1.max(self.end.saturating_sub(self.ell));
        for q in from..=self.end {
            let lens = self.recent.lens(q) as u64;
            if lens <= 1 || self.recent.lnks(q) != 0 {
                continue;
            }
            if let Some((ln, x)) = self.win.marked_lcp(&self.marks, q - 1) {
                if ln as u64 + 1 >= lens {
                    let k = self.bidx.pred_query(x);
                    self.recent.set_lnks(q, k as u32);
                }
            }
        }
        self.audit_lnks(from, self.end);
    }

    /// `ℓ ← 4ℓ` and a fresh phase starting right after position `m`.
    fn grow(&mut self) -> Result<()> {
        let b = self.m;
        let ell = self.ell * 4;
        self.stats.growths += 1;

        // boundaries that may still be extended under the new ℓ leave the trie
        let mut keep = self.trie_next - 1;
        let mut cursor = self.trie_cursor;
        while keep >= 1 {
            let before = cursor - self.phrase(keep).len;
            if before + ell <= b {
                break;
            }
            cursor = before;
            keep -= 1;
        }
        if keep + 1 < self.trie_next {
            self.repair_lnks(keep);
            for j in (keep + 1..self.trie_next).rev() {
                if self.trie.contains(j) {
                    self.trie.delete_boundary(j);
                    if let Some(a) = self.audit.as_mut() {
                        let e: u64 = self.phrases[..j as usize].iter().map(|p| p.len).sum();
                        a.add_suffixes(e, -1);
                    }
                }
            }
            self.trie_next = keep + 1;
            self.trie_cursor = cursor;
        }

        self.ell = ell;
        self.trie.set_nav_cap(&self.phrases, 2 * ell, &self.ctx);
        let ends = if self.audit.is_some() { self.prefix_ends() } else { Vec::new() };
        if let Some(a) = self.audit.as_mut() {
            a.max_len = ell as usize;
            a.suffixes.clear();
            for j in self.trie.stored_boundaries() {
                a.add_suffixes(ends[j as usize], 1);
            }
        }

        // s[lo ..= b] from the parsing, then whatever was read past b
        let lo = 1.max(b.saturating_sub(2 * ell));
        let mut head: Vec<u8> = SuffixIter::new(&self.phrases, self.phrases.len() as u64, b + 1 - lo).collect();
        head.reverse();
        let old_lo = self.win.lo();
        let old = std::mem::replace(&mut self.win, WindowIndex::build(Vec::new(), 1, &self.ctx)).into_text();
        let overlap_from = (b + 1 - old_lo) as usize;
        if let Some(a) = self.audit.as_mut() {
            let keep_from = lo.max(old_lo);
            let rebuilt = &head[(keep_from - lo) as usize..];
            if rebuilt != &old[(keep_from - old_lo) as usize..overlap_from] {
                a.fail(b, "window rebuilt from the parsing differs from the input".into());
            }
        }
        head.extend_from_slice(&old[overlap_from..]);
        self.begin_phase(b, lo, head)?;
        self.audit_after_growth();
        Ok(())
    }

    /// Entries of `lnks` pointing past boundary `keep` are redirected to a
    /// surviving boundary with the same suffix, or cleared.
    fn repair_lnks(&mut self, keep: u64) {
        for q in self.recent.start()..=self.recent.end() {
            let k = self.recent.lnks(q) as u64;
            if k <= keep {
                continue;
            }
            let lens = self.recent.lens(q) as u64;
            let next = match self.trie.leaf(k) {
                Some(v) => {
                    let u = self.trie.highest_with_len(v, lens.saturating_sub(1));
                    let phr = self.trie.phr(u);
                    if phr <= keep {
                        phr
                    } else {
                        0
                    }
                }
                None => 0,
            };
            self.recent.set_lnks(q, next as u32);
        }
    }

    fn prefix_ends(&self) -> Vec<u64> {
        let mut ends = Vec::with_capacity(self.phrases.len() + 1);
        ends.push(0);
        for p in &self.phrases {
            ends.push(ends.last().unwrap() + p.len);
        }
        ends
    }

    // ---- audits ----

    /// `trie_limit` is the largest `|f_1 … f_{k-1}|` a stored boundary `k`
    /// may have, `None` when the trie must be empty.
    fn audit_structures(&mut self, trie_limit: Option<u64>) {
        let Some(mut a) = self.audit.take() else {
            return;
        };
        let m = self.m;
        let ends = self.prefix_ends();
        if let Err(e) = self.trie.audit_with_text(&self.phrases, &ends, &self.ctx, Some(&a.text)) {
            a.fail(m, format!("trie: {e}"));
        }
        if self.trie.peak_node_count() > 2 * self.phrases.len() + 1 {
            a.fail(m, "trie node count exceeds 2z + 1".into());
        }

        // trie holds exactly the boundaries allowed by the phase geometry
        let want: Vec<u64> = (1..=self.phrases.len() as u64)
            .filter(|&k| trie_limit.is_some_and(|t| ends[k as usize - 1] <= t) && !a.skipped.contains(&k))
            .collect();
        if self.trie.stored_boundaries() != want {
            a.fail(m, "trie boundary set differs from the phase precondition".into());
        }

        // marks and boundary index describe the in-window phrase ends
        if !self.marks.audit() {
            a.fail(m, "mark tree internal bits inconsistent".into());
        }
        let lo = self.win.lo();
        let mut marked: Vec<u64> = self.marks.marked_leaves().map(|r| lo + self.win.sa()[r] as u64).collect();
        marked.sort_unstable();
        let in_window: Vec<u64> = ends[1..].iter().copied().filter(|&e| e >= lo && e <= m).collect();
        if marked != in_window {
            a.fail(m, "marked leaves differ from in-window phrase ends".into());
        }
        let indexed: Vec<(u64, u64)> = self.bidx.iter().collect();
        let want_idx: Vec<(u64, u64)> = (1..ends.len())
            .filter(|&k| ends[k] >= lo && ends[k] <= m)
            .map(|k| (ends[k], k as u64))
            .collect();
        if indexed != want_idx {
            a.fail(m, "boundary index differs from a scan of phrase lengths".into());
        }

        // phrase fingerprints and lens history
        for (i, p) in self.phrases.iter().enumerate().rev().take(4) {
            let e = ends[i + 1] as usize;
            if p.hash != self.ctx.lhash(&a.text[e - p.len as usize..e]) {
                a.fail(m, format!("phrase {} fingerprint stale", i + 1));
            }
        }
        for q in self.recent.start()..=self.recent.end().min(m) {
            let l = self.recent.lens(q) as u64;
            if l != 0 && l != a.history[q as usize] {
                a.fail(m, format!("lens[{q}] = {l} but the history says {}", a.history[q as usize]));
            }
        }
        self.audit = Some(a);
    }

    fn trie_limit(&self) -> Option<u64> {
        self.start.checked_sub(self.ell)
    }

    fn audit_phase_end(&mut self) {
        self.audit_structures(self.trie_limit());
    }

    fn audit_after_growth(&mut self) {
        if self.audit.is_some() {
            self.audit_structures(self.trie_limit());
            self.audit_lnks(self.recent.start(), self.m);
        }
    }

    /// Each known `lnks[q]` is a stored boundary whose prefix ends with the
    /// copied part of the last phrase of `s[1..q]`; nil iff there is none.
    fn audit_lnks(&mut self, from: u64, to: u64) {
        let Some(mut a) = self.audit.take() else {
            return;
        };
        let ends = self.prefix_ends();
        for q in from..=to {
            let lens = self.recent.lens(q) as usize;
            if lens <= 1 {
                continue;
            }
            let qe = q as usize - 1; // exclusive end of the copied part, 0-based
            let part = &a.text[qe + 1 - lens..qe];
            let k = self.recent.lnks(q) as u64;
            if k != 0 {
                let ok = self.trie.contains(k) && {
                    let e = ends[k as usize] as usize;
                    e >= part.len() && &a.text[e - part.len()..e] == part
                };
                if !ok {
                    a.fail(self.m, format!("lnks[{q}] = {k} is not a witness"));
                }
            } else if part.len() <= a.max_len && a.suffixes.get(part).is_some_and(|&c| c > 0) {
                a.fail(self.m, format!("lnks[{q}] is nil but a stored boundary qualifies"));
            }
        }
        self.audit = Some(a);
    }
}
