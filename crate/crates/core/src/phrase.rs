//! The compressed representation: a sequence of LZ-End phrases.
//!
//! Phrase `i` (1-based) is `len` characters long; its first `len - 1`
//! characters are a suffix of `f_1 … f_lnk` and its last character is `c`.
//! Everything here works from that recursion alone: suffix retrieval,
//! right-to-left emission, full decoding and the `LZE1` file format.

use std::io::{self, Read, Write};

use crate::error::{Error, Result};
use crate::fingerprint::Fp;

/// One phrase record. `lnk` is a 1-based phrase index, 0 meaning nil.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Phrase {
    pub c: u8,
    pub len: u64,
    pub hash: Fp,
    pub lnk: u64,
}

impl Phrase {
    pub fn literal(c: u8) -> Self {
        Self {
            c,
            len: 1,
            hash: Fp(0),
            lnk: 0,
        }
    }

    pub fn copy(lnk: u64, len: u64, c: u8) -> Self {
        Self {
            c,
            len,
            hash: Fp(0),
            lnk: if len == 1 { 0 } else { lnk },
        }
    }
}

/// Yields the last `k` characters of `f_1 … f_j` from right to left.
///
/// Frames are `(phrase, remaining)`; each frame emits one character, so the
/// total work is O(k). The stack is reusable across calls via
/// [`SuffixIter::with_stack`].
pub struct SuffixIter<'a> {
    phrases: &'a [Phrase],
    stack: Vec<(u64, u64)>,
}

impl<'a> SuffixIter<'a> {
    pub fn new(phrases: &'a [Phrase], j: u64, k: u64) -> Self {
        Self::with_stack(phrases, j, k, Vec::new())
    }

    pub fn with_stack(phrases: &'a [Phrase], j: u64, k: u64, mut stack: Vec<(u64, u64)>) -> Self {
        stack.clear();
        if k > 0 {
            stack.push((j, k));
        }
        Self { phrases, stack }
    }

    pub fn into_stack(self) -> Vec<(u64, u64)> {
        self.stack
    }

    /// Like `next` but reports a structurally impossible frame instead of panicking.
    pub fn try_next(&mut self) -> Result<Option<u8>> {
        let Some((j, k)) = self.stack.pop() else {
            return Ok(None);
        };
        if j == 0 || j as usize > self.phrases.len() {
            return Err(Error::CorruptParsing(format!("reference to phrase {j}")));
        }
        let ph = &self.phrases[j as usize - 1];
        if ph.len == 0 {
            return Err(Error::CorruptParsing(format!("phrase {j} has length 0")));
        }
        if k > ph.len {
            self.stack.push((j - 1, k - ph.len));
        }
        let inner = k.min(ph.len) - 1;
        if inner > 0 {
            if ph.lnk == 0 || ph.lnk >= j {
                return Err(Error::CorruptParsing(format!(
                    "phrase {j} links to {}",
                    ph.lnk
                )));
            }
            self.stack.push((ph.lnk, inner));
        }
        Ok(Some(ph.c))
    }
}

impl Iterator for SuffixIter<'_> {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        self.try_next().expect("corrupt parsing")
    }
}

/// An LZ-End parsing `s = f_1 … f_z` together with `n = |s|`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Parsing {
    phrases: Vec<Phrase>,
    n: u64,
}

const MAGIC: &[u8; 4] = b"LZE1";
const VERSION: u8 = 1;
const RECORD_BYTES: usize = 17;

impl Parsing {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a parsing from records, recomputing `n`. No consistency check
    /// beyond what [`Parsing::validate`] does is implied.
    pub fn from_phrases(phrases: Vec<Phrase>) -> Self {
        let n = phrases.iter().map(|p| p.len).sum();
        Self { phrases, n }
    }

    pub fn phrases(&self) -> &[Phrase] {
        &self.phrases
    }

    pub fn z(&self) -> usize {
        self.phrases.len()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn max_phrase_len(&self) -> u64 {
        self.phrases.iter().map(|p| p.len).max().unwrap_or(0)
    }

    pub fn phrase_lengths(&self) -> impl Iterator<Item = u64> + '_ {
        self.phrases.iter().map(|p| p.len)
    }

    /// Checks the structural invariants every decodable parsing satisfies:
    /// non-zero lengths, backward links, and sources long enough to copy from.
    pub fn validate(&self) -> Result<()> {
        let mut prefix: Vec<u64> = Vec::with_capacity(self.phrases.len() + 1);
        prefix.push(0);
        for (i, ph) in self.phrases.iter().enumerate() {
            let idx = i as u64 + 1;
            if ph.len == 0 {
                return Err(Error::CorruptParsing(format!("phrase {idx} has length 0")));
            }
            if ph.lnk >= idx {
                return Err(Error::CorruptParsing(format!(
                    "phrase {idx} links forward to {}",
                    ph.lnk
                )));
            }
            if ph.len > 1 {
                if ph.lnk == 0 {
                    return Err(Error::CorruptParsing(format!("phrase {idx} has no source")));
                }
                if prefix[ph.lnk as usize] < ph.len - 1 {
                    return Err(Error::CorruptParsing(format!(
                        "phrase {idx} copies {} bytes from a {}-byte prefix",
                        ph.len - 1,
                        prefix[ph.lnk as usize]
                    )));
                }
            }
            prefix.push(prefix[i] + ph.len);
        }
        if *prefix.last().unwrap() != self.n {
            return Err(Error::CorruptParsing(format!(
                "phrase lengths sum to {} but n = {}",
                prefix.last().unwrap(),
                self.n
            )));
        }
        Ok(())
    }

    /// The last `k` characters of `f_1 … f_j`, in text order.
    pub fn retrieve_suffix(&self, j: usize, k: u64) -> Result<Vec<u8>> {
        if j > self.phrases.len() {
            return Err(Error::CorruptParsing(format!("no phrase {j}")));
        }
        let avail: u64 = self.phrases[..j].iter().map(|p| p.len).sum();
        if k > avail {
            return Err(Error::SuffixTooLong {
                requested: k,
                available: avail,
            });
        }
        let mut out = Vec::with_capacity(k as usize);
        let mut it = SuffixIter::new(&self.phrases, j as u64, k);
        while let Some(b) = it.try_next()? {
            out.push(b);
        }
        out.reverse();
        Ok(out)
    }

    /// Characters of the decoded string from position n down to 1.
    pub fn emit_reversed(&self) -> SuffixIter<'_> {
        SuffixIter::new(&self.phrases, self.phrases.len() as u64, self.n)
    }

    /// Decodes left to right into `sink`.
    pub fn decode_to<W: Write>(&self, sink: &mut W) -> Result<()> {
        self.validate()?;
        let out = self.decode_unchecked();
        sink.write_all(&out)?;
        Ok(())
    }

    pub fn decode(&self) -> Result<Vec<u8>> {
        self.validate()?;
        Ok(self.decode_unchecked())
    }

    fn decode_unchecked(&self) -> Vec<u8> {
        let mut out: Vec<u8> = Vec::with_capacity(self.n as usize);
        let mut ends: Vec<usize> = Vec::with_capacity(self.phrases.len() + 1);
        ends.push(0);
        for ph in &self.phrases {
            if ph.len > 1 {
                let src_end = ends[ph.lnk as usize];
                let copy = ph.len as usize - 1;
                out.extend_from_within(src_end - copy..src_end);
            }
            out.push(ph.c);
            ends.push(out.len());
        }
        out
    }

    pub fn serialize<W: Write>(&self, sink: &mut W) -> io::Result<()> {
        let mut header = [0u8; 24];
        header[..4].copy_from_slice(MAGIC);
        header[4] = VERSION;
        header[8..16].copy_from_slice(&self.n.to_le_bytes());
        header[16..24].copy_from_slice(&(self.phrases.len() as u64).to_le_bytes());
        sink.write_all(&header)?;
        let mut rec = [0u8; RECORD_BYTES];
        for ph in &self.phrases {
            rec[..8].copy_from_slice(&ph.lnk.to_le_bytes());
            rec[8..16].copy_from_slice(&ph.len.to_le_bytes());
            rec[16] = ph.c;
            sink.write_all(&rec)?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = Vec::with_capacity(24 + RECORD_BYTES * self.phrases.len());
        self.serialize(&mut v).expect("writing to a Vec cannot fail");
        v
    }

    pub fn deserialize<R: Read>(source: &mut R) -> Result<Self> {
        let mut header = [0u8; 24];
        read_full(source, &mut header, "header")?;
        if &header[..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        if header[4] != VERSION {
            return Err(Error::Format(format!("unsupported version {}", header[4])));
        }
        if header[5..8] != [0, 0, 0] {
            return Err(Error::Format("reserved bytes are not zero".into()));
        }
        let n = u64::from_le_bytes(header[8..16].try_into().unwrap());
        let z = u64::from_le_bytes(header[16..24].try_into().unwrap());
        let mut phrases = Vec::with_capacity(z.min(1 << 20) as usize);
        let mut rec = [0u8; RECORD_BYTES];
        for _ in 0..z {
            read_full(source, &mut rec, "phrase record")?;
            phrases.push(Phrase {
                lnk: u64::from_le_bytes(rec[..8].try_into().unwrap()),
                len: u64::from_le_bytes(rec[8..16].try_into().unwrap()),
                c: rec[16],
                hash: Fp(0),
            });
        }
        let mut trailing = [0u8; 1];
        if source.read(&mut trailing)? != 0 {
            return Err(Error::Format("trailing bytes after last record".into()));
        }
        let parsing = Self { phrases, n };
        parsing.validate()?;
        Ok(parsing)
    }

    pub(crate) fn set_n(&mut self, n: u64) {
        self.n = n;
    }
}

fn read_full<R: Read>(source: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    let mut filled = 0;
    while filled < buf.len() {
        match source.read(&mut buf[filled..]) {
            Ok(0) => return Err(Error::Format(format!("truncated {what}"))),
            Ok(k) => filled += k,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

impl std::fmt::Display for Parsing {
    /// Dotted notation, e.g. `a.b.aba.aa.aaac`; non-printable bytes are escaped.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let text = self.decode().map_err(|_| std::fmt::Error)?;
        let mut pos = 0usize;
        for (i, ph) in self.phrases.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            for &b in &text[pos..pos + ph.len as usize] {
                if b.is_ascii_graphic() {
                    write!(f, "{}", b as char)?;
                } else {
                    write!(f, "\\x{b:02x}")?;
                }
            }
            pos += ph.len as usize;
        }
        Ok(())
    }
}
