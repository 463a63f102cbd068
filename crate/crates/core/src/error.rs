use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A Fock cutoff below the minimum of two levels.
    InvalidDimension { dim: usize },
    /// Matrix or parameter entries that are NaN or infinite.
    NonFinite(&'static str),
    /// A homodyne bin with `z1 >= z2` after clamping.
    InvalidInterval { z1: f64, z2: f64 },
    /// A physical parameter outside its admissible range.
    InvalidParameter { name: &'static str, value: f64 },
    /// A parameter vector whose length does not match the scenario layout.
    LayoutMismatch { expected: usize, found: usize },
    /// Structured settings whose slot kind differs from the scenario pattern.
    SlotMismatch {
        slot: &'static str,
        expected: &'static str,
    },
    /// An unknown scenario, variant or axis identifier.
    UnknownName {
        kind: &'static str,
        name: alloc::string::String,
    },
    /// The 2x2 block did not settle before the maximum cutoff.
    CutoffNotConverged { max_dim: usize, residual: f64 },
    /// The maximized CHSH value does not exceed 2 at the ideal point.
    NoViolation { best_s: f64 },
    /// Every restart of an optimization failed.
    AllRestartsFailed,
}

impl Error {
    /// Mathematical failures (as opposed to invalid input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::CutoffNotConverged { .. } | Error::NoViolation { .. } | Error::AllRestartsFailed
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDimension { dim } => {
                write!(
                    f,
                    "invalid Fock cutoff {dim}: at least 2 levels are required"
                )
            }
            Error::NonFinite(what) => write!(f, "non-finite values in {what}"),
            Error::InvalidInterval { z1, z2 } => {
                write!(
                    f,
                    "invalid homodyne interval [{z1}, {z2}]: lower endpoint must be below upper"
                )
            }
            Error::InvalidParameter { name, value } => {
                write!(f, "parameter {name} = {value} is out of range")
            }
            Error::LayoutMismatch { expected, found } => {
                write!(
                    f,
                    "parameter vector has {found} entries, scenario layout expects {expected}"
                )
            }
            Error::SlotMismatch { slot, expected } => {
                write!(f, "slot {slot} must be {expected} in this scenario")
            }
            Error::UnknownName { kind, name } => write!(f, "unknown {kind} '{name}'"),
            Error::CutoffNotConverged { max_dim, residual } => write!(
                f,
                "Fock cutoff did not converge up to dimension {max_dim} (residual {residual:e})"
            ),
            Error::NoViolation { best_s } => write!(
                f,
                "no CHSH violation at eta = p = 1 (best S = {best_s:.6}), threshold undefined"
            ),
            Error::AllRestartsFailed => f.write_str("every optimizer restart failed"),
        }
    }
}

impl core::error::Error for Error {}
