//! Numerical machinery for one-dimensional quasi-periodic Schrödinger
//! operators `(Hψ)(n) = −ψ(n+1) − ψ(n−1) + λV(Tⁿx)ψ(n)` driven by a shift or
//! skew-shift `T` of the 2-torus.
//!
//! The crate is organised bottom-up:
//!
//! * [`torus`] – the shift and skew-shift, with exact closed-form orbits.
//! * [`diophantine`] – continued fractions and `‖k·ω‖` enumeration.
//! * [`potential`] and [`ergodic`] – `C^α` potentials, mollification,
//!   exponential sums, Birkhoff averages and level-set statistics.
//! * [`operator`] – Dirichlet determinants, monodromies, Sturm
//!   eigensolver and Green functions on finite windows.
//! * [`experiments`] – Lyapunov exponents, large-deviation scans and
//!   localization diagnostics.
//! * [`verify`] – the identity and statistics suites behind the CLI's
//!   `verify` command.

pub mod diophantine;
pub mod error;
pub mod ergodic;
pub mod experiments;
pub mod operator;
pub mod potential;
pub mod report;
pub mod rng;
pub mod stats;
pub mod torus;
pub mod verify;

pub use error::{Error, Result};
pub use torus::{Dynamics, TorusPoint};
