//! Numerical core for testing single-photon nonlocality with feasible detectors.
//!
//! The crate evaluates and maximizes the CHSH correlation of the path-entangled
//! state `(|1,0> + |0,1>)/sqrt(2)` when each party measures either with an
//! on-off detector preceded by displacement and squeezing, or with a homodyne
//! detector whose outcome is binned to `±1` by an interval.
//!
//! Everything here is `no_std` (with `alloc`). IO, the command line and the
//! thread pool live in the companion `spqn` crate.
//!
//! Module map:
//!
//! * [`fock`]: truncated Fock-space operators, matrix exponential, Gaussian
//!   unitaries and quadrature wavefunctions.
//! * [`measurement`]: the effective 2x2 observables on the `{|0>, |1>}`
//!   manifold for on-off and homodyne detection.
//! * [`scenario`]: source state, scenario catalog, parameter layout and the
//!   CHSH evaluation.
//! * [`optimizer`]: seeded multistart Nelder-Mead maximization of `S`.
//! * [`robustness`]: `(eta, p)` sweeps and violation thresholds.
//! * [`oracle`]: slow independent reference computations for testing.
//! * [`reference`]: published optimal settings translated to this crate's
//!   conventions, used as warm starts.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod fock;
pub mod measurement;
pub mod optimizer;
pub mod oracle;
pub mod reference;
pub mod robustness;
pub mod scenario;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Tsirelson bound `2 sqrt(2)`.
pub const TSIRELSON_BOUND: f64 = 2.0 * core::f64::consts::SQRT_2;

/// Local-realistic bound of the CHSH functional.
pub const CLASSICAL_BOUND: f64 = 2.0;
