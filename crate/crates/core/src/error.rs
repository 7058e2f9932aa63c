use alloc::string::String;
use core::fmt;

/// Errors raised by the solvers and their input types.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Shapes do not agree, or a size is zero.
    InvalidDimension(String),
    /// A value lies outside the domain of an operation (NaN, negative KL input, `eps <= 0`, ...).
    Domain(String),
    /// The requested loss has no separable decomposition.
    UnsupportedLoss(&'static str),
    /// A weight vector is not a strictly positive probability vector.
    InvalidHistogram(String),
    /// An enumeration oracle was asked for an instance beyond its size bound.
    OracleTooLarge { size: usize, max: usize },
    /// Inconsistent configuration (e.g. proportions not summing to one).
    Config(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDimension(msg) => write!(f, "invalid dimension: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::UnsupportedLoss(name) => {
                write!(f, "loss {name} has no factored decomposition")
            }
            Error::InvalidHistogram(msg) => write!(f, "invalid histogram: {msg}"),
            Error::OracleTooLarge { size, max } => {
                write!(f, "oracle refuses size {size} (bound is {max})")
            }
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! dim_err {
    ($($arg:tt)*) => {
        $crate::Error::InvalidDimension(alloc::format!($($arg)*))
    };
}

macro_rules! domain_err {
    ($($arg:tt)*) => {
        $crate::Error::Domain(alloc::format!($($arg)*))
    };
}

pub(crate) use dim_err;
pub(crate) use domain_err;
