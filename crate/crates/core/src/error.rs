use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// A constructor or operation argument is outside its documented range.
    InvalidArgument {
        name: &'static str,
        reason: &'static str,
    },
    /// Lengths of paired inputs disagree.
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// Interpolation nodes must be pairwise distinct.
    DuplicateNode { index: usize },
    /// A right-hand side component came back NaN or infinite.
    NonFinite {
        step: usize,
        stage: usize,
        component: usize,
    },
    /// Evaluation point outside `[a, b]`.
    OutOfRange { t: f64, a: f64, b: f64 },
    /// The generalized inverse has no solution below the search cap.
    NoInverse { epsilon: f64 },
    /// No grid cell satisfies the error target within the search limits.
    Infeasible { epsilon: f64 },
    /// An instance requires data it does not carry (e.g. an exact solution).
    Unsupported(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument { name, reason } => write!(f, "invalid `{name}`: {reason}"),
            Error::LengthMismatch {
                what,
                expected,
                found,
            } => write!(f, "{what}: expected length {expected}, found {found}"),
            Error::DuplicateNode { index } => write!(f, "duplicate interpolation node at index {index}"),
            Error::NonFinite {
                step,
                stage,
                component,
            } => write!(
                f,
                "non-finite right-hand side value at step {step}, stage {stage}, component {component}"
            ),
            Error::OutOfRange { t, a, b } => write!(f, "t = {t} outside [{a}, {b}]"),
            Error::NoInverse { epsilon } => {
                write!(f, "no generalized inverse for epsilon = {epsilon}")
            }
            Error::Infeasible { epsilon } => {
                write!(f, "no feasible (n, N) within search limits for epsilon = {epsilon}")
            }
            Error::Unsupported(what) => write!(f, "unsupported: {what}"),
        }
    }
}

pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Error {
    Error::InvalidArgument { name, reason }
}

impl core::error::Error for Error {}
