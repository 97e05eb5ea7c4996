use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can be rejected by an operation in this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid length is not a power of two, or is below the minimum.
    Sizing { len: usize },
    /// Two operands live on grids of different length.
    LengthMismatch { expected: usize, found: usize },
    /// A frequency index lies outside the resolvable band `[-N/2, N/2]`.
    FrequencyOutOfRange { frequency: i64, limit: i64 },
    /// An exponent is outside the range an operation accepts.
    Exponent { name: &'static str, value: f64 },
    /// A parameter violates a documented precondition.
    InvalidParameter { name: &'static str, reason: &'static str },
    /// Admissible constants violate one of their invariants.
    Constants(&'static str),
    /// A weight sample is not strictly positive and finite.
    NonPositiveWeight { index: usize },
    /// An input sequence was empty.
    Empty,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Sizing { len } => {
                write!(f, "grid length {len} is not a power of two >= 8")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "grid length mismatch: expected {expected}, found {found}")
            }
            Error::FrequencyOutOfRange { frequency, limit } => {
                write!(f, "frequency {frequency} outside resolvable band |k| <= {limit}")
            }
            Error::Exponent { name, value } => write!(f, "exponent {name} = {value} out of range"),
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::Constants(why) => write!(f, "inadmissible constants: {why}"),
            Error::NonPositiveWeight { index } => {
                write!(f, "weight sample {index} is not strictly positive and finite")
            }
            Error::Empty => f.write_str("empty input"),
        }
    }
}

impl core::error::Error for Error {}
