use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("bound entry {index} is not strictly positive")]
    NonpositiveBound { index: usize },
    #[error("lambda must be strictly positive")]
    NonpositiveLambda,
    #[error("threshold too large: 2*tau*lambda = {two_tau_lambda} must be below a = {a}")]
    ThresholdTooLarge { two_tau_lambda: f64, a: f64 },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("point is infeasible at index {index}")]
    InfeasiblePoint { index: usize },
    #[error("image side {side} is not a power of two")]
    SideNotPowerOfTwo { side: usize },
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("signal has zero norm")]
    ZeroSignal,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            got,
        })
    }
}
