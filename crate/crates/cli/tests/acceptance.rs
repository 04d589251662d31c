//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any failed. Pass criterion numbers as arguments to run a
//! subset, e.g. `cargo test --test acceptance -- 1 7`.

use std::io::{self, Cursor, Read, Seek, SeekFrom};
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use lzend::oracle::{gen_repetitive, lzend_bruteforce, lz77_phrase_count, random_text};
use lzend::{parse_adaptive, verify_bytes, FingerprintContext, Mode, Parser, Parsing};
use lzend_cli::{encode, EncodeOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (u32, fn() -> Outcome, Duration);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn lengths(p: &Parsing) -> Vec<u64> {
    p.phrase_lengths().collect()
}

fn all_strings(sigma: u8, max_len: usize) -> impl Iterator<Item = Vec<u8>> {
    (0..=max_len).flat_map(move |len| {
        let total = (sigma as u64).pow(len as u32);
        (0..total).map(move |mut code| {
            let mut s = vec![0u8; len];
            for c in s.iter_mut() {
                *c = b'a' + (code % sigma as u64) as u8;
                code /= sigma as u64;
            }
            s
        })
    })
}

fn small_exhaustive() -> impl Iterator<Item = Vec<u8>> {
    all_strings(2, 14).chain(all_strings(3, 9))
}

/// The randomized inputs: 1000 strings of length up to 5000 over alphabets
/// of size 2, 4 and 26, each tagged with one of five fingerprint seeds.
fn random_cases() -> Vec<(u64, Vec<u8>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..1000u64)
        .map(|i| {
            let len = rng.gen_range(0..=5000);
            let sigma = [2, 4, 26][(i % 3) as usize];
            (i % 5 + 11, random_text(&mut rng, len, sigma))
        })
        .collect()
}

fn shown(s: &[u8]) -> String {
    String::from_utf8_lossy(s).into_owned()
}

fn criterion_1() -> Outcome {
    let ctx = FingerprintContext::from_seed(1);
    for (text, want) in [
        ("ababaaaaaac", "a.b.aba.aa.aaac"),
        ("ababbbabb", "a.b.abb.ba.bb"),
        ("ababbbabbc", "a.b.abb.babbc"),
    ] {
        let got = parse_adaptive(text.as_bytes(), &ctx).map_err(|e| e.to_string())?;
        ensure!(got.to_string() == want, "{text}: got {got}, want {want}");
    }
    Ok("3 examples exact".into())
}

fn criterion_2() -> Outcome {
    let ctx = FingerprintContext::from_seed(1);
    let mut count = 0;
    for s in small_exhaustive() {
        let got = parse_adaptive(&s[..], &ctx).map_err(|e| e.to_string())?;
        ensure!(
            lengths(&got) == lengths(&lzend_bruteforce(&s)),
            "{}: got {got}, oracle {}",
            shown(&s),
            lzend_bruteforce(&s)
        );
        ensure!(verify_bytes(&got, &s).map_err(|e| e.to_string())?.is_ok(), "{}: verify", shown(&s));
        count += 1;
    }
    Ok(format!("{count} strings, 0 mismatches"))
}

fn criterion_3() -> Outcome {
    let cases = random_cases();
    for (i, (seed, s)) in cases.iter().enumerate() {
        let got = parse_adaptive(&s[..], &FingerprintContext::from_seed(*seed)).map_err(|e| e.to_string())?;
        ensure!(lengths(&got) == lengths(&lzend_bruteforce(s)), "case {i}: differs from oracle");
        ensure!(verify_bytes(&got, s).map_err(|e| e.to_string())?.is_ok(), "case {i}: verify");
    }
    Ok(format!("{} strings, 5 seeds, 0 mismatches", cases.len()))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let modes = [Mode::fixed(8), Mode::fixed(64), Mode::fixed(1024)]
        .map(|m| m.unwrap())
        .into_iter()
        .chain([Mode::Adaptive]);
    let modes: Vec<Mode> = modes.collect();
    for i in 0..500 {
        let s = if i % 2 == 0 {
            let len = rng.gen_range(0..6000);
            random_text(&mut rng, len, [1, 2, 4, 26, 200][i % 5])
        } else {
            let seed_size = rng.gen_range(1..400);
            gen_repetitive(seed_size, rng.gen_range(1..40), 0.01, i as u64)
        };
        for &mode in &modes {
            let opts = EncodeOptions {
                mode,
                seed: i as u64,
                verify: true,
                max_retries: 3,
            };
            let r = encode(&mut Cursor::new(&s), &opts).map_err(|e| e.to_string())?;
            ensure!(r.parsing.decode().map_err(|e| e.to_string())? == s, "input {i} {mode:?}: decode differs");
            if let Mode::Fixed { ell } = mode {
                ensure!(
                    r.parsing.max_phrase_len() <= ell,
                    "input {i}: phrase of length {} exceeds {ell}",
                    r.parsing.max_phrase_len()
                );
            }
        }
    }
    Ok("500 inputs x 4 modes round-trip and verify".into())
}

fn criterion_5() -> Outcome {
    let ctx = FingerprintContext::from_seed(1);
    let mut worst = 0.0f64;
    for s in small_exhaustive() {
        let mut zs = Vec::with_capacity(s.len());
        let p = Parser::new(Mode::Adaptive, ctx.clone())
            .observe(|ev| zs.push(ev.z))
            .run(&s[..])
            .map_err(|e| e.to_string())?
            .parsing;
        let z = p.z();
        ensure!(zs.len() == s.len(), "{}: {} events for {} bytes", shown(&s), zs.len(), s.len());
        for (m, &zp) in zs.iter().enumerate() {
            ensure!(3 * z >= zp, "{}: prefix {} has {zp} phrases, final {z}", shown(&s), m + 1);
            worst = worst.max(zp as f64 / z as f64);
        }
    }
    Ok(format!("max z(prefix)/z(final) = {worst:.3}"))
}

fn criterion_6() -> Outcome {
    let data = gen_repetitive(50 * 1024, 200, 1e-4, 6);
    let ell = 8 << 20;
    let p = lzend::parse_fixed(&data[..], ell, &FingerprintContext::from_seed(6)).map_err(|e| e.to_string())?;
    ensure!(verify_bytes(&p, &data).map_err(|e| e.to_string())?.is_ok(), "verify failed");
    let z77 = lz77_phrase_count(&data);
    let ratio = p.z() as f64 / z77 as f64;
    if ratio > 1.5 {
        return Err(format!("z'={} z77={z77} ratio {ratio:.4} > 1.5", p.z()));
    }
    Ok(format!("z'={} z77={z77} ratio={ratio:.4}", p.z()))
}

/// Read + Seek wrapper that records every non-empty read as (offset, len).
struct Recorder {
    inner: Cursor<Vec<u8>>,
    reads: Vec<(u64, u64)>,
}

impl Read for Recorder {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let at = self.inner.position();
        let k = self.inner.read(buf)?;
        if k > 0 {
            self.reads.push((at, k as u64));
        }
        Ok(k)
    }
}

impl Seek for Recorder {
    fn seek(&mut self, pos: SeekFrom) -> io::Result<u64> {
        self.inner.seek(pos)
    }
}

/// Checks `reads` is one contiguous forward sweep of `[0, n)`, followed by
/// `backward` contiguous right-to-left sweeps.
fn check_sweeps(reads: &[(u64, u64)], n: u64, backward: usize) -> Result<(), String> {
    let mut i = 0;
    let mut cur = 0;
    while cur < n {
        let &(at, len) = reads.get(i).ok_or("forward sweep ended early")?;
        ensure!(at == cur, "forward read {i} at {at}, expected {cur}");
        cur += len;
        i += 1;
    }
    ensure!(cur == n, "forward sweep overran to {cur}");
    for pass in 0..backward {
        let mut cur = n;
        while cur > 0 {
            let &(at, len) = reads.get(i).ok_or(format!("backward pass {pass} ended early"))?;
            ensure!(at + len == cur, "backward read {i} is [{at}, {}), expected end {cur}", at + len);
            cur = at;
            i += 1;
        }
    }
    ensure!(i == reads.len(), "{} extra reads", reads.len() - i);
    Ok(())
}

fn criterion_7() -> Outcome {
    let data = gen_repetitive(30_000, 40, 1e-3, 7);
    let n = data.len() as u64;
    for verify in [false, true] {
        let mut rec = Recorder {
            inner: Cursor::new(data.clone()),
            reads: Vec::new(),
        };
        let opts = EncodeOptions {
            mode: Mode::fixed(1 << 16).unwrap(),
            seed: 7,
            verify,
            max_retries: 1,
        };
        let r = encode(&mut rec, &opts).map_err(|e| e.to_string())?;
        ensure!(r.parsing.n() == n, "parsed {} of {n} bytes", r.parsing.n());
        check_sweeps(&rec.reads, n, verify as usize).map_err(|e| format!("verify={verify}: {e}"))?;
    }
    Ok(format!("{n} bytes: 1 forward sweep, +1 backward with verify"))
}

fn criterion_8() -> Outcome {
    let cases = random_cases();
    let mut phases = 0;
    for (i, (seed, s)) in cases.iter().enumerate() {
        let out = Parser::new(Mode::fixed(16).unwrap(), FingerprintContext::from_seed(*seed))
            .audit(true)
            .run(&s[..])
            .map_err(|e| e.to_string())?;
        ensure!(out.audit_failures.is_empty(), "case {i}: {}", out.audit_failures.join("; "));
        ensure!(out.parsing.decode().map_err(|e| e.to_string())? == *s, "case {i}: decode differs");
        phases += out.stats.phases;
    }
    Ok(format!("{} strings, {phases} phases audited", cases.len()))
}

fn criterion_9() -> Outcome {
    let data = gen_repetitive(50 * 1024, 2048, 1e-4, 9);
    let ell: u64 = 1 << 16;
    let out = Parser::new(Mode::fixed(ell).unwrap(), FingerprintContext::from_seed(9))
        .run(&data[..])
        .map_err(|e| e.to_string())?;
    let z = out.parsing.z();
    let st = &out.stats;
    ensure!(st.n == data.len() as u64, "parsed {} bytes", st.n);
    ensure!(st.peak_trie_nodes <= 2 * z + 1, "peak trie nodes {} > 2z+1 = {}", st.peak_trie_nodes, 2 * z + 1);
    ensure!(
        st.peak_window as u64 <= 3 * ell + 1,
        "peak window {} > 3*ell+1 = {}",
        st.peak_window,
        3 * ell + 1
    );
    ensure!(verify_bytes(&out.parsing, &data).map_err(|e| e.to_string())?.is_ok(), "verify failed");
    Ok(format!(
        "n={} z={z} peak_trie_nodes={} peak_window={} ell={ell}",
        st.n, st.peak_trie_nodes, st.peak_window
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, criterion_1, Duration::from_secs(1)),
        (2, criterion_2, Duration::from_secs(300)),
        (3, criterion_3, Duration::from_secs(600)),
        (4, criterion_4, Duration::MAX),
        (5, criterion_5, Duration::MAX),
        (6, criterion_6, Duration::from_secs(300)),
        (7, criterion_7, Duration::MAX),
        (8, criterion_8, Duration::MAX),
        (9, criterion_9, Duration::from_secs(1800)),
    ];
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, f, limit) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|_| Err("panicked".into()))
            .and_then(|msg| {
                let took = t.elapsed();
                if took > limit {
                    Err(format!("{msg}; took {took:.1?}, limit {limit:?}"))
                } else {
                    Ok(msg)
                }
            });
        let took = t.elapsed().as_secs_f64();
        match result {
            Ok(msg) => println!("criterion {id}: PASS ({msg}; {took:.2}s)"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id}: FAIL ({msg}; {took:.2}s)");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
