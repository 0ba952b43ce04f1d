//! Finite Hilbert transform on (-1, 1).
//!
//! `T(f)(x) = (1/pi) p.v. ∫_{-1}^{1} f(t)/(t - x) dt`
//!
//! Modules:
//! - [`chebrep`]: Chebyshev-weighted spectral series and sampled grid functions.
//! - [`quad`]: Gauss rules and the graded integration engine shared by everything else.
//! - [`func`]: the [`func::ScalarFn`] abstraction evaluated by the quadrature paths.
//! - [`transform`]: `T`, its companion `T̂`, the projection `P`, Calderón domination.
//! - [`rearrange`]: decreasing rearrangements and rearrangement-invariant norms.
//! - [`inversion`]: airfoil equation solver, range diagnostics, Parseval pairing.
//! - [`verify`]: identity, norm-bound and constant suites with JSON reports.
//! - [`cli`]: configuration and command implementations behind the binary.

pub mod catalog;
pub mod chebrep;
pub mod cli;
pub mod error;
pub mod func;
pub mod inversion;
pub mod quad;
pub mod rearrange;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
