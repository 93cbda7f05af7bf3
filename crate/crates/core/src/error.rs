use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Operand shapes disagree.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// The normal-equation matrix could not be factored, or is too badly
    /// conditioned for an unregularized fit.
    SingularSystem { rcond: f64 },
    /// A dataset failed its construction invariants.
    InvalidDataset(&'static str),
    /// A bias rule's delta template does not contain zero.
    InvalidRule { rule: usize },
    /// A fractional budget outside `[0, 1]`.
    BadFraction(f64),
    /// A count budget larger than the training set.
    BudgetTooLarge { k: usize, n: usize },
    /// An operation that needs `{-1, +1}` labels got regression labels.
    NotBinary,
    NegativeEpsilon(f64),
    NegativeLambda(f64),
    /// The brute-force oracle would exceed its enumeration guard.
    BudgetExceeded { evaluations: u128, limit: u128 },
    NotSquare { rows: usize, cols: usize },
    /// Linear solve against a singular square matrix.
    Singular,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "dimension mismatch in {what}: expected {expected}, found {found}"),
            Error::SingularSystem { rcond } => {
                write!(f, "normal equations are singular (rcond estimate {rcond:e})")
            }
            Error::InvalidDataset(msg) => write!(f, "invalid dataset: {msg}"),
            Error::InvalidRule { rule } => {
                write!(f, "bias rule {rule}: delta template must contain 0")
            }
            Error::BadFraction(p) => write!(f, "budget fraction {p} is outside [0, 1]"),
            Error::BudgetTooLarge { k, n } => {
                write!(f, "budget k = {k} exceeds training set size {n}")
            }
            Error::NotBinary => f.write_str("operation requires binary {-1, +1} labels"),
            Error::NegativeEpsilon(e) => write!(f, "epsilon must be nonnegative, got {e}"),
            Error::NegativeLambda(l) => write!(f, "lambda must be nonnegative, got {l}"),
            Error::BudgetExceeded { evaluations, limit } => write!(
                f,
                "oracle enumeration needs {evaluations} evaluations, limit is {limit}"
            ),
            Error::NotSquare { rows, cols } => {
                write!(f, "expected a square matrix, got {rows}x{cols}")
            }
            Error::Singular => f.write_str("matrix is singular"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}
