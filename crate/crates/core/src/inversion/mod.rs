//! Inversion of `T`: the airfoil equation, range evidence, domain
//! diagnostics and the Parseval pairing.

pub mod airfoil;
pub mod domain;
pub mod parseval;
pub mod range;

pub use airfoil::{flat_l1, solve_airfoil, solve_airfoil_quadrature, AirfoilSolution, Coefficient, Particular};
pub use domain::{optimal_domain_diag, DepthSup, MembershipDiagnostic, DEFAULT_GROWTH_RTOL};
pub use parseval::{pairing, parseval_residual, Operand, ParsevalResult};
pub use range::{range_check, range_check_fn, RangeConfig, RangeReport, Verdict};
