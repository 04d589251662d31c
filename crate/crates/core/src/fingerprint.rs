//! Karp–Rabin fingerprints over the Mersenne prime 2^61 - 1.
//!
//! `hash(t) = Σ t[i]·α^(i-1) mod μ` and `lhash(t) = hash(reverse(t))`. The
//! parser only ever needs `lhash` of substrings of the current window, which
//! [`WindowFingerprints`] answers in O(1) after an O(|window|) build.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The modulus μ = 2^61 - 1.
pub const MODULUS: u64 = (1 << 61) - 1;

/// A fingerprint value, always reduced below [`MODULUS`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp(pub u64);

#[inline]
fn reduce(x: u128) -> u64 {
    let lo = (x as u64) & MODULUS;
    let hi = (x >> 61) as u64;
    let r = lo + hi;
    // lo + hi < 2^62, so one more fold is enough
    let r = (r & MODULUS) + (r >> 61);
    if r >= MODULUS {
        r - MODULUS
    } else {
        r
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64) -> u64 {
    reduce(a as u128 * b as u128)
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + MODULUS - b
    }
}

/// Base α and a table of its powers.
#[derive(Clone, Debug)]
pub struct FingerprintContext {
    alpha: u64,
    pow: Vec<u64>,
}

impl FingerprintContext {
    /// Draws α uniformly from `[0, μ)` using a seeded ChaCha stream.
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::with_alpha(rng.gen_range(0..MODULUS))
    }

    pub fn with_alpha(alpha: u64) -> Self {
        assert!(alpha < MODULUS, "alpha must be reduced modulo mu");
        Self {
            alpha,
            pow: vec![1],
        }
    }

    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    /// Extends the power table so that `pow(k)` is available for all `k <= max`.
    pub fn ensure_powers(&mut self, max: usize) {
        if self.pow.len() > max {
            return;
        }
        self.pow.reserve(max + 1 - self.pow.len());
        let mut last = *self.pow.last().unwrap();
        while self.pow.len() <= max {
            last = mul_mod(last, self.alpha);
            self.pow.push(last);
        }
    }

    pub fn powers_len(&self) -> usize {
        self.pow.len()
    }

    /// α^k mod μ. Panics if `k` is beyond the precomputed table.
    #[inline]
    pub fn pow(&self, k: usize) -> u64 {
        self.pow[k]
    }

    pub fn hash(&self, t: &[u8]) -> Fp {
        // Horner from the right end: hash = t[0] + α(t[1] + α(t[2] + ...))
        let mut h = 0u64;
        for &b in t.iter().rev() {
            h = add_mod(mul_mod(h, self.alpha), b as u64);
        }
        Fp(h)
    }

    pub fn lhash(&self, t: &[u8]) -> Fp {
        let mut h = 0u64;
        for &b in t {
            h = add_mod(mul_mod(h, self.alpha), b as u64);
        }
        Fp(h)
    }
}

/// Accumulates `lhash` of a string whose characters arrive right to left,
/// i.e. `hash` of the reversed sequence as it is emitted.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ReverseAccumulator {
    value: u64,
    power: u64,
    alpha: u64,
}

impl ReverseAccumulator {
    pub(crate) fn new(ctx: &FingerprintContext) -> Self {
        Self {
            value: 0,
            power: 1,
            alpha: ctx.alpha,
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, b: u8) {
        self.value = add_mod(self.value, mul_mod(b as u64, self.power));
        self.power = mul_mod(self.power, self.alpha);
    }

    pub(crate) fn finish(&self) -> Fp {
        Fp(self.value)
    }
}

/// Prefix fingerprints of a window: `acc[k] = lhash(window[..k])`.
///
/// `lhash(window[i..=j]) = acc[j + 1] - acc[i]·α^(j - i + 1)`.
#[derive(Clone, Debug, Default)]
pub struct WindowFingerprints {
    acc: Vec<u64>,
}

impl WindowFingerprints {
    /// Requires `ctx` to hold powers up to `window.len()`.
    pub fn build(window: &[u8], ctx: &FingerprintContext) -> Self {
        assert!(ctx.powers_len() > window.len(), "power table too short");
        let mut acc = Vec::with_capacity(window.len() + 1);
        let mut h = 0u64;
        acc.push(h);
        for &b in window {
            h = add_mod(mul_mod(h, ctx.alpha), b as u64);
            acc.push(h);
        }
        Self { acc }
    }

    pub fn len(&self) -> usize {
        self.acc.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `lhash(window[i..=j])` for window-local offsets `i <= j`.
    #[inline]
    pub fn substring_lhash(&self, i: usize, j: usize, ctx: &FingerprintContext) -> Fp {
        assert!(i <= j && j < self.len(), "substring {i}..={j} outside window");
        let shifted = mul_mod(self.acc[i], ctx.pow(j - i + 1));
        Fp(sub_mod(self.acc[j + 1], shifted))
    }

    /// `lhash` of the `len` characters ending at window offset `end`
    /// (inclusive); the empty string hashes to zero.
    #[inline]
    pub fn lhash_ending_at(&self, end: usize, len: usize, ctx: &FingerprintContext) -> Fp {
        if len == 0 {
            return Fp(0);
        }
        self.substring_lhash(end + 1 - len, end, ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_hash(t: &[u8], alpha: u64, mu: u64) -> u64 {
        let mut h = 0u128;
        let mut p = 1u128;
        for &b in t {
            h = (h + b as u128 * p) % mu as u128;
            p = p * alpha as u128 % mu as u128;
        }
        h as u64
    }

    #[test]
    fn empty_and_single() {
        let ctx = FingerprintContext::from_seed(3);
        assert_eq!(ctx.hash(b""), Fp(0));
        assert_eq!(ctx.lhash(b""), Fp(0));
        assert_eq!(ctx.hash(b"q"), Fp(b'q' as u64));
        assert_eq!(ctx.lhash(b"q"), ctx.hash(b"q"));
    }

    #[test]
    fn hash_formula_small_modulus_oracle() {
        // (97 + 98*7) mod 101 = 76 and (98 + 97*7) mod 101 = 70
        assert_eq!(naive_hash(b"ab", 7, 101), 76);
        assert_eq!(naive_hash(b"ba", 7, 101), 70);
        let ctx = FingerprintContext::with_alpha(7);
        assert_eq!(ctx.hash(b"ab").0, naive_hash(b"ab", 7, MODULUS));
        assert_eq!(ctx.lhash(b"ab").0, naive_hash(b"ba", 7, MODULUS));
    }

    #[test]
    fn reduce_edges() {
        assert_eq!(mul_mod(MODULUS - 1, MODULUS - 1), 1);
        assert_eq!(add_mod(MODULUS - 1, 1), 0);
        assert_eq!(sub_mod(0, 1), MODULUS - 1);
    }

    #[test]
    fn window_abab_all_substrings() {
        let mut ctx = FingerprintContext::from_seed(11);
        let w = b"abab";
        ctx.ensure_powers(w.len());
        let fps = WindowFingerprints::build(w, &ctx);
        let mut count = 0;
        for i in 0..w.len() {
            for j in i..w.len() {
                assert_eq!(fps.substring_lhash(i, j, &ctx), ctx.lhash(&w[i..=j]));
                count += 1;
            }
        }
        assert_eq!(count, 10);
        assert_eq!(fps.substring_lhash(0, 3, &ctx), ctx.lhash(w));
    }

    #[test]
    fn empty_window() {
        let ctx = FingerprintContext::from_seed(1);
        let fps = WindowFingerprints::build(b"", &ctx);
        assert!(fps.is_empty());
    }

    #[test]
    fn deterministic_per_seed() {
        let a = FingerprintContext::from_seed(42);
        let b = FingerprintContext::from_seed(42);
        assert_eq!(a.alpha(), b.alpha());
        assert_eq!(a.hash(b"lz-end"), b.hash(b"lz-end"));
    }

    #[test]
    fn reverse_accumulator_matches_lhash() {
        let ctx = FingerprintContext::from_seed(5);
        let t = b"mississippi";
        let mut acc = ReverseAccumulator::new(&ctx);
        for &b in t.iter().rev() {
            acc.push(b);
        }
        assert_eq!(acc.finish(), ctx.lhash(t));
    }

    proptest! {
        #[test]
        fn lhash_is_hash_of_reverse(t in proptest::collection::vec(any::<u8>(), 0..64), seed in any::<u64>()) {
            let ctx = FingerprintContext::from_seed(seed);
            let mut r = t.clone();
            r.reverse();
            prop_assert_eq!(ctx.lhash(&t), ctx.hash(&r));
            prop_assert_eq!(ctx.hash(&t).0, naive_hash(&t, ctx.alpha(), MODULUS));
        }

        #[test]
        fn window_extraction(w in proptest::collection::vec(0u8..4, 300), seed in any::<u64>(),
                             pairs in proptest::collection::vec((0usize..300, 0usize..300), 1000)) {
            let mut ctx = FingerprintContext::from_seed(seed);
            ctx.ensure_powers(w.len());
            let fps = WindowFingerprints::build(&w, &ctx);
            for (a, b) in pairs {
                let (i, j) = (a.min(b), a.max(b));
                prop_assert_eq!(fps.substring_lhash(i, j, &ctx), ctx.lhash(&w[i..=j]));
            }
        }
    }
}
