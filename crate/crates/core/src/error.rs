use thiserror::Error;

/// Errors raised when an input falls outside the domain of a formula.
///
/// Verification failures are not errors; see [`crate::oracle::Verdict`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("shift equals negative integer: {0}")]
    NegativeIntegerShift(String),

    #[error("shift {0} is below -1, outside the supported domain")]
    ShiftBelowMinusOne(String),

    #[error("equal shifts are excluded: {0}")]
    EqualShifts(String),

    #[error("shifts must be strictly increasing: {0}")]
    NotIncreasing(String),

    #[error("need at least {needed} shifts, got {got}")]
    TooFewShifts { needed: usize, got: usize },

    #[error("precision of {0} bits is below the 64-bit minimum")]
    PrecisionTooLow(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cannot parse {input:?} as a rational: {reason}")]
    Parse { input: String, reason: String },

    #[error("{0} exceeds the supported machine range")]
    OutOfRange(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
