//! LZ-End parsing in space proportional to the output.
//!
//! The parser reads its input once, left to right, and keeps only the phrase
//! array, a compressed trie of reversed boundary prefixes and a window of the
//! most recent text. See [`parse_fixed`] and [`parse_adaptive`].

pub mod error;
pub mod fingerprint;
pub mod oracle;
pub mod parser;
pub mod phrase;
pub mod trie;
pub mod verify;
pub mod window;

pub use error::{Error, Result};
pub use fingerprint::{FingerprintContext, Fp};
pub use phrase::{Parsing, Phrase, SuffixIter};
pub use parser::{parse_adaptive, parse_fixed, Mode, ParseOutcome, ParseStats, Parser, StepEvent, StepKind};
pub use verify::{verify, verify_bytes, Verdict};
