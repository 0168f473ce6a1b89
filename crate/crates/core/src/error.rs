use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two operands disagree on a dimension.
    Shape {
        context: &'static str,
        expected: (usize, usize),
        actual: (usize, usize),
    },
    /// A NaN or infinity showed up where only finite values are allowed.
    NonFinite(&'static str),
    /// Train-mode batch normalization needs at least two rows.
    BatchTooSmall {
        rows: usize,
    },
    /// Backward was called with a tape recorded against an older parameter set.
    StaleTape {
        recorded: u64,
        current: u64,
    },
    InvalidConfig(String),
    InvalidData(String),
    /// Training produced a non-finite loss.
    Diverged {
        epoch: usize,
        iteration: usize,
        term: &'static str,
    },
    /// The requested significance level has no embedded critical values.
    UnsupportedLevel,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape {
                context,
                expected,
                actual,
            } => write!(
                f,
                "shape mismatch in {context}: expected {}x{}, got {}x{}",
                expected.0, expected.1, actual.0, actual.1
            ),
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::BatchTooSmall { rows } => write!(
                f,
                "train-mode batch normalization needs at least 2 rows, got {rows}"
            ),
            Error::StaleTape { recorded, current } => write!(
                f,
                "stale tape: recorded at parameter version {recorded}, state is at {current}"
            ),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::InvalidData(msg) => write!(f, "invalid data: {msg}"),
            Error::Diverged {
                epoch,
                iteration,
                term,
            } => write!(
                f,
                "non-finite {term} at epoch {epoch}, iteration {iteration}"
            ),
            Error::UnsupportedLevel => {
                write!(
                    f,
                    "only the 0.05 two-tailed significance level is supported"
                )
            }
        }
    }
}

impl core::error::Error for Error {}
