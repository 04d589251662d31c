//! Reference implementations: a brute-force LZ-End parser, LZ77 phrase
//! counts and a generator for repetitive test corpora.
//!
//! Everything here favours obviousness over speed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::phrase::{Parsing, Phrase};
use crate::window::{lcp_array, suffix_array, Rmq};

/// For each 0-based exclusive boundary end in `ends`, the longest prefix of
/// `pat` that is a suffix of `s[..end]`. Returns the best length and the
/// 1-based index of a boundary attaining it.
fn longest_boundary_suffix(s: &[u8], ends: &[usize], pat: &[u8]) -> (usize, u64) {
    let Some(&last) = ends.last() else {
        return (0, 0);
    };
    if pat.is_empty() {
        return (0, 0);
    }
    let mut fail = vec![0usize; pat.len()];
    let mut k = 0;
    for i in 1..pat.len() {
        while k > 0 && pat[i] != pat[k] {
            k = fail[k - 1];
        }
        if pat[i] == pat[k] {
            k += 1;
        }
        fail[i] = k;
    }

    let (mut best, mut src) = (0usize, 0u64);
    let mut next = 0;
    let mut state = 0usize;
    for (i, &c) in s[..last].iter().enumerate() {
        if state == pat.len() {
            state = fail[state - 1];
        }
        while state > 0 && c != pat[state] {
            state = fail[state - 1];
        }
        if c == pat[state] {
            state += 1;
        }
        if i + 1 == ends[next] {
            if state > best {
                best = state;
                src = next as u64 + 1;
            }
            next += 1;
        }
    }
    (best, src)
}

/// The exact LZ-End parsing of `s`: each phrase is the longest prefix of the
/// remaining text minus its last character that is a suffix of some
/// boundary prefix `f_1 … f_j`, extended by one explicit character.
pub fn lzend_bruteforce(s: &[u8]) -> Parsing {
    let n = s.len();
    let mut phrases = Vec::new();
    let mut ends = Vec::new();
    let mut k = 0;
    while k < n {
        let (copy, src) = longest_boundary_suffix(s, &ends, &s[k..n - 1]);
        let c = s[k + copy];
        phrases.push(if copy == 0 {
            Phrase::literal(c)
        } else {
            Phrase::copy(src, copy as u64 + 1, c)
        });
        k += copy + 1;
        ends.push(k);
    }
    Parsing::from_phrases(phrases)
}

/// Definitional search over all boundaries and all candidate lengths with
/// plain slice comparison. Cubic; for cross-checking on tiny inputs.
pub fn lzend_naive(s: &[u8]) -> Vec<u64> {
    let n = s.len();
    let mut lens = Vec::new();
    let mut ends: Vec<usize> = Vec::new();
    let mut k = 0;
    while k < n {
        let mut copy = 0;
        'len: for l in (1..n - k).rev() {
            for &e in &ends {
                if e >= l && s[e - l..e] == s[k..k + l] {
                    copy = l;
                    break 'len;
                }
            }
        }
        lens.push(copy as u64 + 1);
        k += copy + 1;
        ends.push(k);
    }
    lens
}

/// Number of phrases of greedy LZ77 with overlapping sources: each phrase is
/// the longest previous factor, capped so one character remains, plus one
/// literal character.
pub fn lz77_phrase_count(s: &[u8]) -> u64 {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let sa = suffix_array(s);
    let lcp = lcp_array(s, &sa);
    let mut rank = vec![0usize; n];
    for (r, &p) in sa.iter().enumerate() {
        rank[p as usize] = r;
    }
    let rmq = Rmq::new(lcp);
    let lcp_ranks = |a: usize, b: usize| -> usize {
        let (a, b) = (a.min(b), a.max(b));
        rmq.min(a + 1, b) as usize
    };

    // nearest ranks on either side holding a smaller text position
    let mut psv = vec![usize::MAX; n];
    let mut nsv = vec![usize::MAX; n];
    let mut stack: Vec<usize> = Vec::new();
    for r in 0..n {
        while let Some(&t) = stack.last() {
            if sa[t] > sa[r] {
                nsv[t] = r;
                stack.pop();
            } else {
                break;
            }
        }
        psv[r] = stack.last().copied().unwrap_or(usize::MAX);
        stack.push(r);
    }

    let mut count = 0;
    let mut i = 0;
    while i < n {
        let r = rank[i];
        let mut lpf = 0;
        if psv[r] != usize::MAX {
            lpf = lpf.max(lcp_ranks(psv[r], r));
        }
        if nsv[r] != usize::MAX {
            lpf = lpf.max(lcp_ranks(r, nsv[r]));
        }
        i += lpf.min(n - i - 1) + 1;
        count += 1;
    }
    count
}

/// The same count by scanning every earlier start position.
pub fn lz77_phrase_count_naive(s: &[u8]) -> u64 {
    let n = s.len();
    let mut count = 0;
    let mut i = 0;
    while i < n {
        let mut best = 0;
        for j in 0..i {
            let l = s[j..].iter().zip(&s[i..n - 1]).take_while(|(a, b)| a == b).count();
            best = best.max(l);
        }
        i += best + 1;
        count += 1;
    }
    count
}

/// `copies` copies of one random block of `seed_size` bytes over `alphabet`;
/// every copy after the first has each byte replaced by a different random
/// symbol with probability `mutation_rate`.
pub fn gen_repetitive_over(
    seed_size: usize,
    copies: usize,
    mutation_rate: f64,
    rng_seed: u64,
    alphabet: &[u8],
) -> Vec<u8> {
    assert!((0.0..=1.0).contains(&mutation_rate), "mutation rate out of range");
    assert!(!alphabet.is_empty(), "empty alphabet");
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let block: Vec<u8> = (0..seed_size)
        .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
        .collect();
    let mut out = Vec::with_capacity(seed_size * copies);
    for copy in 0..copies {
        if copy == 0 {
            out.extend_from_slice(&block);
            continue;
        }
        for &b in &block {
            if alphabet.len() > 1 && rng.gen_bool(mutation_rate) {
                let mut m = b;
                while m == b {
                    m = alphabet[rng.gen_range(0..alphabet.len())];
                }
                out.push(m);
            } else {
                out.push(b);
            }
        }
    }
    out
}

/// [`gen_repetitive_over`] with the full byte alphabet.
pub fn gen_repetitive(seed_size: usize, copies: usize, mutation_rate: f64, rng_seed: u64) -> Vec<u8> {
    let alphabet: Vec<u8> = (0..=255).collect();
    gen_repetitive_over(seed_size, copies, mutation_rate, rng_seed, &alphabet)
}

/// Uniform random string of length `len` over the first `sigma` lowercase
/// letters (continuing past `z` and wrapping for `sigma > 26`).
pub fn random_text<R: Rng>(rng: &mut R, len: usize, sigma: u8) -> Vec<u8> {
    (0..len).map(|_| b'a'.wrapping_add(rng.gen_range(0..sigma))).collect()
}
