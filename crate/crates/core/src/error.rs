use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("corrupt parsing: {0}")]
    CorruptParsing(String),

    #[error("bad parse file: {0}")]
    Format(String),

    #[error("suffix too long: requested {requested} bytes of a {available}-byte prefix")]
    SuffixTooLong { requested: u64, available: u64 },

    #[error("invalid phrase length bound {0}: must be a power of two >= 8")]
    InvalidEll(u64),

    #[error("input length {input} does not match parsing length {parsing}")]
    LengthMismatch { input: u64, parsing: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
