use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid format: {0}")]
    InvalidFormat(String),

    #[error("significand {num}/2^{den_log2} is outside [1, 2)")]
    SignificandOutOfRange { num: u128, den_log2: u32 },

    #[error("word 0x{bits:x} has bits above width {width}")]
    WordTooWide { bits: u64, width: u32 },

    #[error("operand formats differ: {0} vs {1}")]
    FormatMismatch(String, String),

    #[error("value is not exactly representable as binary64")]
    NotExact,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("unknown workload `{0}`")]
    UnknownWorkload(String),

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("trace has {len} pairs, fewer than chunk length {chunk_len}")]
    TraceTooShort { len: usize, chunk_len: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
