use thiserror::Error;

/// Errors raised by the library. Every variant maps to a stable code in the C interface.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero object has no content or direction")]
    ZeroObject,
    #[error("bad sequence: {0}")]
    BadSequence(String),
    #[error("program is unbounded")]
    Unbounded,
    #[error("bad Roy triple: {0}")]
    BadRoyTriple(String),
    #[error("letters a and b must differ")]
    EqualLetters,
    #[error("no admissible matrix N exists for this seed")]
    NoAdmissibleN,
    #[error("admissibility solution space has dimension {0} (expected 1)")]
    DegenerateSeed(usize),
    #[error("admissibility matrix N is singular")]
    SingularN,
    #[error("degenerate growth: {0}")]
    DegenerateGrowth(String),
    #[error("capacity exceeded while building index {k}")]
    Capacity { k: usize },
    #[error("bad index {0}")]
    BadIndex(i64),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("search radius {radius} exceeds cap {cap}")]
    TooLarge { radius: u64, cap: u64 },
    #[error("empty candidate set")]
    NoCandidates,
    #[error("delta {0} is not in [0, sigma/(1+sigma))")]
    ImproperDelta(String),
    #[error("exponent out of range: {0}")]
    OutOfRange(String),
    #[error("gray fans are implemented for the all-ones program only")]
    FibonacciOnly,
    #[error("bad window: {0}")]
    BadWindow(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
