use thiserror::Error;

/// Errors raised by every solver and parser in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("entry {index} is not strictly positive ({value})")]
    NonPositiveEntry { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, expected 1 within 1e-9")]
    NotNormalized { sum: f64 },

    #[error("a distribution needs at least 2 components, got {len}")]
    TooShort { len: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("item {index} assigned to block {block}, but only {m} blocks exist")]
    BlockOutOfRange { index: usize, block: usize, m: usize },

    #[error("block {block} is empty in a strict partition")]
    EmptyBlock { block: usize },

    #[error("negative mass {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("invalid target size m={m} for n={n}")]
    BadM { m: usize, n: usize },

    #[error("invalid dimension n={n}")]
    BadN { n: usize },

    #[error("epsilon {epsilon} outside (0, 1/6)")]
    BadEpsilon { epsilon: f64 },

    #[error("no bin can take an item of size {item}")]
    InfeasiblePlacement { item: f64 },

    #[error("n={n} exceeds the exhaustive-search cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("malformed 3-Partition instance: {0}")]
    MalformedInstance(String),

    #[error("optimum matches the target but no valid certificate could be extracted: {0}")]
    CertificateMismatch(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by bad caller input, as opposed to a broken
    /// internal invariant.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::InfeasiblePlacement { .. } | Error::CertificateMismatch(_) | Error::InvariantViolation(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
