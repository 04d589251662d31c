//! Backward verification: read the input right to left and compare it with
//! the parsing emitted right to left.

use std::io::{Cursor, Read, Seek, SeekFrom};

use crate::error::{Error, Result};
use crate::phrase::Parsing;

const BLOCK: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    /// 1-based position of the rightmost differing byte.
    Mismatch { position: u64 },
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        *self == Verdict::Ok
    }
}

/// Compares `parsing` with `source` in one backward pass of block reads.
/// A length difference is an error and is detected before reading any data.
pub fn verify<R: Read + Seek>(parsing: &Parsing, source: &mut R) -> Result<Verdict> {
    let input = source.seek(SeekFrom::End(0))?;
    if input != parsing.n() {
        return Err(Error::LengthMismatch {
            input,
            parsing: parsing.n(),
        });
    }
    let mut emitted = parsing.emit_reversed();
    let mut buf = vec![0u8; BLOCK];
    let mut pos = input;
    while pos > 0 {
        let from = pos.saturating_sub(BLOCK as u64);
        let chunk = &mut buf[..(pos - from) as usize];
        source.seek(SeekFrom::Start(from))?;
        source.read_exact(chunk)?;
        for (i, &b) in chunk.iter().enumerate().rev() {
            let want = emitted
                .try_next()?
                .ok_or_else(|| Error::CorruptParsing("parsing shorter than its length".into()))?;
            if want != b {
                return Ok(Verdict::Mismatch {
                    position: from + i as u64 + 1,
                });
            }
        }
        pos = from;
    }
    Ok(Verdict::Ok)
}

/// [`verify`] against an in-memory input.
pub fn verify_bytes(parsing: &Parsing, input: &[u8]) -> Result<Verdict> {
    verify(parsing, &mut Cursor::new(input))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{lzend_bruteforce, random_text};
    use rand::{Rng, SeedableRng};

    #[test]
    fn detects_last_byte() {
        let p = lzend_bruteforce(b"ababaaaaaac");
        assert_eq!(verify_bytes(&p, b"ababaaaaaac").unwrap(), Verdict::Ok);
        assert_eq!(
            verify_bytes(&p, b"ababaaaaaab").unwrap(),
            Verdict::Mismatch { position: 11 }
        );
    }

    #[test]
    fn empty_and_length_mismatch() {
        assert!(verify_bytes(&Parsing::new(), b"").unwrap().is_ok());
        let p = lzend_bruteforce(b"abc");
        assert!(matches!(
            verify_bytes(&p, b"abcd"),
            Err(Error::LengthMismatch { input: 4, parsing: 3 })
        ));
    }

    #[test]
    fn agrees_with_decode_across_blocks() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let s = random_text(&mut rng, 3 * BLOCK + 17, 2);
        let p = crate::parse_adaptive(&s[..], &crate::FingerprintContext::from_seed(1)).unwrap();
        assert!(verify_bytes(&p, &s).unwrap().is_ok());
        for _ in 0..20 {
            let mut t = s.clone();
            let i = rng.gen_range(0..t.len());
            t[i] ^= 1;
            assert_eq!(
                verify_bytes(&p, &t).unwrap(),
                Verdict::Mismatch { position: i as u64 + 1 }
            );
        }
    }
}
