use thiserror::Error;

/// Errors raised by the toolkit. Every variant is a violated precondition or
/// malformed input; no operation fails for numerical reasons except
/// [`Error::Overflow`].
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid bit character {ch:?} at offset {offset}")]
    InvalidBit { ch: char, offset: usize },
    #[error("malformed hex bit string: {0}")]
    MalformedHex(String),
    #[error("hex length {requested} exceeds the {available} bits supplied")]
    HexLengthTooLarge { requested: usize, available: usize },
    #[error("pattern length {0} outside 1..=64")]
    PatternLength(u32),
    #[error("pattern value {value} does not fit in {k} bits")]
    PatternValue { k: u32, value: u64 },
    #[error("point {0} lies outside [0, 1)")]
    PointOutOfRange(String),
    #[error("prefix count M = {m} outside 1..={max}")]
    PrefixCount { m: usize, max: usize },
    #[error("pattern length {k} exceeds sequence length {n}")]
    PatternTooLong { k: u32, n: usize },
    #[error("empty point set")]
    EmptyPointSet,
    #[error("point denominator 2^{0} exceeds the supported 2^64")]
    DenominatorTooLarge(u32),
    #[error("window of {w} bits too small; need at least {min}")]
    WindowTooSmall { w: u32, min: u32 },
    #[error("window of {0} bits exceeds the supported 64")]
    WindowTooLarge(u32),
    #[error("pattern length {k} exceeds window of {w} bits")]
    PatternExceedsWindow { k: u32, w: u32 },
    #[error("digit stream {label} exhausted after {available} digits ({requested} requested)")]
    StreamExhausted {
        label: String,
        requested: usize,
        available: usize,
    },
    #[error("checkpoint {checkpoint} outside 1..={n}")]
    Checkpoint { checkpoint: usize, n: usize },
    #[error("invalid rational {p}/{q}: need 0 <= p < q")]
    InvalidRational { p: u64, q: u64 },
    #[error("malformed generator spec {0:?}")]
    GeneratorSpec(String),
    #[error("malformed point {0:?}; expected num/2^w")]
    MalformedPoint(String),
    #[error("sequence length {0} outside the supported search range 1..=30")]
    SearchLength(usize),
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
