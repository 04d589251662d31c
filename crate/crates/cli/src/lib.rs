//! Command-line front end for `lzend`: encode, decode, verify, stats and
//! bench. The binary in `main.rs` only forwards to [`run`].

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lzend::oracle::{gen_repetitive_over, lz77_phrase_count};
use lzend::{FingerprintContext, Mode, ParseStats, Parsing, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_CORRUPT: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

pub const DEFAULT_SEED: u64 = 0x6c7a_656e_6400_0001;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("corrupt input: {0}")]
    Corrupt(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Verify(_) => EXIT_VERIFY,
            CliError::Corrupt(_) => EXIT_CORRUPT,
        }
    }
}

impl From<lzend::Error> for CliError {
    fn from(e: lzend::Error) -> Self {
        match e {
            lzend::Error::Io(e) => CliError::Io(e),
            lzend::Error::InvalidEll(_) => CliError::Usage(e.to_string()),
            lzend::Error::LengthMismatch { .. } => CliError::Verify(e.to_string()),
            other => CliError::Corrupt(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lzend", version, about = "LZ-End parsing of byte streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a file into an LZE1 phrase file.
    Encode(EncodeArgs),
    /// Expand an LZE1 file back to the original bytes.
    Decode {
        input: PathBuf,
        /// Output file; standard output when omitted or `-`.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check an LZE1 file against the original with one backward pass.
    Verify { parsing: PathBuf, original: PathBuf },
    /// Print phrase statistics of an LZE1 file.
    Stats { input: PathBuf },
    /// Parse a generated repetitive corpus (or a file) and report z values.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct EncodeArgs {
    /// Input file, `-` for standard input (fixed mode without --verify only).
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    mode: ModeArgs,
    /// Check the result against the input and retry with fresh fingerprints.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = 3)]
    max_retries: u32,
}

#[derive(Debug, Args)]
struct ModeArgs {
    /// Cap phrase lengths at this many bytes (power of two, at least 8).
    #[arg(long, value_name = "BYTES", conflicts_with = "adaptive")]
    ell: Option<u64>,
    /// Exact parsing with a growing window (the default).
    #[arg(long)]
    adaptive: bool,
    /// Seed for the fingerprint base.
    #[arg(long, env = "LZEND_SEED")]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Parse this file instead of a generated corpus.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 50 * 1024)]
    seed_size: usize,
    #[arg(long, default_value_t = 200)]
    copies: usize,
    #[arg(long, default_value_t = 1e-4)]
    rate: f64,
    /// Corpus alphabet: `dna` or `bytes`.
    #[arg(long, default_value = "bytes")]
    alphabet: String,
    /// Generator seed.
    #[arg(long, default_value_t = 1)]
    corpus_seed: u64,
    /// Phrase length cap; adaptive parsing when omitted.
    #[arg(long, value_name = "BYTES")]
    ell: Option<u64>,
    #[arg(long, env = "LZEND_SEED")]
    seed: Option<u64>,
    /// Skip the LZ77 count above this input size.
    #[arg(long, default_value_t = 1 << 28)]
    lz77_limit: u64,
}

/// What `encode` should do.
#[derive(Clone, Copy, Debug)]
pub struct EncodeOptions {
    pub mode: Mode,
    pub seed: u64,
    pub verify: bool,
    pub max_retries: u32,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Adaptive,
            seed: DEFAULT_SEED,
            verify: false,
            max_retries: 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EncodeReport {
    pub parsing: Parsing,
    pub stats: ParseStats,
    /// Parses run, including the successful one.
    pub attempts: u32,
    /// Seed of the fingerprint base that produced `parsing`.
    pub seed: u64,
}

/// Seed used for the `attempt`-th try (0-based).
pub fn attempt_seed(seed: u64, attempt: u32) -> u64 {
    seed.wrapping_add((attempt as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Parses a forward-only stream; no verification is possible.
pub fn encode_stream<R: Read>(source: R, opts: &EncodeOptions) -> Result<EncodeReport, CliError> {
    let ctx = FingerprintContext::from_seed(opts.seed);
    let out = lzend::Parser::new(opts.mode, ctx).run(source)?;
    Ok(EncodeReport {
        parsing: out.parsing,
        stats: out.stats,
        attempts: 1,
        seed: opts.seed,
    })
}

/// Parses `source` from its start. With `verify`, every attempt is followed
/// by one backward pass; a mismatch restarts with a different seed.
pub fn encode<R: Read + Seek>(source: &mut R, opts: &EncodeOptions) -> Result<EncodeReport, CliError> {
    let tries = if opts.verify { opts.max_retries.max(1) } else { 1 };
    for attempt in 0..tries {
        let seed = attempt_seed(opts.seed, attempt);
        source.seek(SeekFrom::Start(0))?;
        let ctx = FingerprintContext::from_seed(seed);
        let out = lzend::Parser::new(opts.mode, ctx).run(&mut *source)?;
        if opts.verify {
            match lzend::verify(&out.parsing, source)? {
                Verdict::Ok => {}
                Verdict::Mismatch { position } => {
                    eprintln!("lzend: attempt {} mismatched at byte {position}, retrying", attempt + 1);
                    continue;
                }
            }
        }
        return Ok(EncodeReport {
            parsing: out.parsing,
            stats: out.stats,
            attempts: attempt + 1,
            seed,
        });
    }
    Err(CliError::Verify(format!("no verified parsing after {tries} attempts")))
}

/// Phrase statistics as `key=value` lines.
pub fn stats_report(p: &Parsing) -> String {
    let mut out = String::new();
    let z = p.z() as u64;
    out.push_str(&format!("n={}\n", p.n()));
    out.push_str(&format!("z={z}\n"));
    let ratio = if z == 0 { 0.0 } else { p.n() as f64 / z as f64 };
    out.push_str(&format!("ratio={ratio:.4}\n"));
    out.push_str(&format!("max_len={}\n", p.max_phrase_len()));
    // len_k counts phrases with length in [k, 2k)
    let mut hist = vec![0u64; 65];
    for l in p.phrase_lengths() {
        hist[63 - l.leading_zeros() as usize] += 1;
    }
    let top = hist.iter().rposition(|&c| c > 0).map_or(0, |i| i + 1);
    for (k, c) in hist[..top].iter().enumerate() {
        out.push_str(&format!("len_{}={c}\n", 1u64 << k));
    }
    out
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|e| CliError::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn read_parsing(path: &Path) -> Result<Parsing, CliError> {
    let mut r = BufReader::new(open(path)?);
    Ok(Parsing::deserialize(&mut r)?)
}

fn encode_cmd(args: EncodeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mode = match args.mode.ell {
        Some(ell) => Mode::fixed(ell)?,
        None => Mode::Adaptive,
    };
    let opts = EncodeOptions {
        mode,
        seed: args.mode.seed.unwrap_or(DEFAULT_SEED),
        verify: args.verify,
        max_retries: args.max_retries,
    };
    let report = if args.input.as_os_str() == "-" {
        if !matches!(mode, Mode::Fixed { .. }) || args.verify {
            return Err(CliError::Usage(
                "standard input needs fixed mode (--ell) and no --verify".into(),
            ));
        }
        encode_stream(io::stdin().lock(), &opts)?
    } else {
        let mut f = BufReader::with_capacity(1 << 20, open(&args.input)?);
        encode(&mut f, &opts)?
    };
    let mut w = BufWriter::new(create(&args.output)?);
    report.parsing.serialize(&mut w)?;
    w.flush()?;
    writeln!(
        out,
        "n={} z={} attempts={} seed={}",
        report.parsing.n(),
        report.parsing.z(),
        report.attempts,
        report.seed
    )?;
    Ok(())
}

fn decode_cmd(input: &Path, output: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let p = read_parsing(input)?;
    match output {
        Some(path) if path.as_os_str() != "-" => {
            let mut w = BufWriter::new(create(path)?);
            p.decode_to(&mut w)?;
            w.flush()?;
        }
        _ => {
            let mut w = BufWriter::new(&mut *out);
            p.decode_to(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn verify_cmd(parsing: &Path, original: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let p = read_parsing(parsing)?;
    let mut f = BufReader::new(open(original)?);
    match lzend::verify(&p, &mut f)? {
        Verdict::Ok => {
            writeln!(out, "ok")?;
            Ok(())
        }
        Verdict::Mismatch { position } => {
            writeln!(out, "mismatch at byte {position}")?;
            Err(CliError::Verify(format!("mismatch at byte {position}")))
        }
    }
}

fn bench_cmd(args: BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let data = match &args.input {
        Some(path) => {
            let mut v = Vec::new();
            open(path)?.read_to_end(&mut v)?;
            v
        }
        None => {
            if !(0.0..=1.0).contains(&args.rate) {
                return Err(CliError::Usage("--rate must be in [0, 1]".into()));
            }
            let alphabet: Vec<u8> = match args.alphabet.as_str() {
                "dna" => b"ACGT".to_vec(),
                "bytes" => (0..=255).collect(),
                other => return Err(CliError::Usage(format!("unknown alphabet {other:?}"))),
            };
            gen_repetitive_over(args.seed_size, args.copies, args.rate, args.corpus_seed, &alphabet)
        }
    };
    let mode = match args.ell {
        Some(ell) => Mode::fixed(ell)?,
        None => Mode::Adaptive,
    };
    let opts = EncodeOptions {
        mode,
        seed: args.seed.unwrap_or(DEFAULT_SEED),
        ..EncodeOptions::default()
    };
    let t = Instant::now();
    let report = encode_stream(&data[..], &opts)?;
    let secs = t.elapsed().as_secs_f64();
    let n = data.len() as u64;
    let z_end = report.parsing.z() as u64;
    writeln!(out, "n={n}")?;
    match args.ell {
        Some(ell) => writeln!(out, "ell={ell}")?,
        None => writeln!(out, "ell=adaptive")?,
    }
    writeln!(out, "z_lzend={z_end}")?;
    if n <= args.lz77_limit {
        let z77 = lz77_phrase_count(&data);
        writeln!(out, "z_lz77={z77}")?;
        let ratio = if z77 == 0 { 0.0 } else { z_end as f64 / z77 as f64 };
        writeln!(out, "ratio={ratio:.4}")?;
    } else {
        writeln!(out, "z_lz77=skipped")?;
    }
    writeln!(out, "max_len={}", report.parsing.max_phrase_len())?;
    writeln!(out, "peak_trie_nodes={}", report.stats.peak_trie_nodes)?;
    writeln!(out, "seconds={secs:.3}")?;
    writeln!(out, "bytes_per_sec={:.0}", n as f64 / secs.max(1e-9))?;
    Ok(())
}

/// Runs the command line `args` (including the program name) and returns the
/// process exit code. Diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{text}");
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::Encode(a) => encode_cmd(a, out),
        Command::Decode { input, output } => decode_cmd(&input, output.as_deref(), out),
        Command::Verify { parsing, original } => verify_cmd(&parsing, &original, out),
        Command::Stats { input } => read_parsing(&input).and_then(|p| {
            out.write_all(stats_report(&p).as_bytes())?;
            Ok(())
        }),
        Command::Bench(a) => bench_cmd(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "lzend: {e}");
            e.exit_code()
        }
    }
}
