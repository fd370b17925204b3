use core::fmt;

/// Failure modes of the Gabor routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Lattice parameters do not describe a separable lattice on `Z_L`.
    Lattice {
        len: usize,
        a: usize,
        b: usize,
        reason: &'static str,
    },
    /// Two objects that must share a length (or a lattice) do not.
    LengthMismatch { expected: usize, found: usize },
    /// The system is not a frame at working precision.
    NotAFrame { lower: f64, upper: f64 },
    /// An integer-oversampling routine was called with `p != 1`.
    NotIntegerOversampling { p: usize, q: usize },
    /// A routine that needs critical sampling (`p = q = 1`) got something else.
    NotCriticallySampled { p: usize, q: usize },
    /// A spectral function produced a non-finite value.
    Undefined { at: f64 },
    /// An iteration hit its limit before reaching the tolerance.
    NoConvergence { iterations: usize, residual: f64 },
    /// A normalization needed a nonzero vector.
    ZeroNorm,
    /// A competitor window is not normalized tight.
    NotTight { residual: f64 },
    /// Too few data points to estimate a quantity.
    TooFewPoints { found: usize, needed: usize },
    /// Any other argument violation.
    InvalidArgument(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Lattice { len, a, b, reason } => {
                write!(f, "invalid lattice L={len}, a={a}, b={b}: {reason}")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::NotAFrame { lower, upper } => write!(
                f,
                "not a frame at working precision (A = {lower:e}, B = {upper:e})"
            ),
            Error::NotIntegerOversampling { p, q } => {
                write!(f, "integer oversampling required, got p/q = {p}/{q}")
            }
            Error::NotCriticallySampled { p, q } => {
                write!(f, "critical sampling required, got p/q = {p}/{q}")
            }
            Error::Undefined { at } => write!(f, "function undefined at eigenvalue {at:e}"),
            Error::NoConvergence {
                iterations,
                residual,
            } => write!(
                f,
                "no convergence after {iterations} iterations (residual {residual:e})"
            ),
            Error::ZeroNorm => write!(f, "vector has zero norm"),
            Error::NotTight { residual } => {
                write!(f, "window is not normalized tight (residual {residual:e})")
            }
            Error::TooFewPoints { found, needed } => {
                write!(f, "too few qualifying points: {found} (need {needed})")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
