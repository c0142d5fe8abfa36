use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("field degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: u32, right: u32 },

    #[error("unsupported field degree {0} (must be in 1..=32)")]
    UnsupportedDegree(u32),

    #[error("field element {value:#x} does not fit in degree {degree}")]
    ElementOutOfRange { value: u64, degree: u32 },

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("seed underflow: needed {needed} more bits, {available} available")]
    SeedUnderflow { needed: usize, available: usize },

    #[error("seed length mismatch: layout expects {expected} bits, seed has {actual}")]
    SeedLengthMismatch { expected: usize, actual: usize },

    #[error("invalid hex seed: {0}")]
    InvalidHex(String),

    #[error("bucket count {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("zero vector has no regularity structure")]
    ZeroVector,

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("enumeration refused: n = {n} exceeds the cap of {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("seed budget exceeded: {bits} seed bits exceed the all-seeds budget of {budget} (try strided mode)")]
    SeedBudget { bits: usize, budget: usize },

    #[error("CNF fooler kind `external` is not implemented")]
    UnsupportedFooler,

    #[error("member {0} is not unate and no orientation was supplied")]
    NonUnate(usize),

    #[error("supplied orientation for member {0} is inconsistent with the set")]
    BadOrientation(usize),

    #[error("{0}")]
    Io(String),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        let (line, column) = (e.line(), e.column());
        let text = e.to_string();
        let suffix = format!(" at line {line} column {column}");
        let message = text.strip_suffix(&suffix).unwrap_or(&text);
        Error::Schema(format!("line {line} column {column}: {message}"))
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
