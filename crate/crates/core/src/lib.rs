//! Numerical laboratory for zeros of random polynomials and random holomorphic
//! sections in the setting of weighted pluripotential theory.
//!
//! The crate is organised bottom-up:
//!
//! * [`poly`]: multivariate complex polynomials, basis families and the
//!   Bergman-type functions `Γₙ(z) = Σⱼ |pₙⱼ(z)|²`.
//! * [`compact`]: weighted compacts `(K, q)`, closed-form extremal functions,
//!   smooth test forms and equilibrium pairings `⟨dd^c V, φ⟩`.
//! * [`ensembles`]: coefficient laws (Gaussian, Fubini–Study, log-tail i.i.d.)
//!   with their logarithmic moment certificates.
//! * [`zeros`]: root finding (Aberth–Ehrlich), bivariate systems via the
//!   Sylvester resultant, and zero-current pairings by root sums and by the
//!   Poincaré–Lelong formula.
//! * [`experiments`] and [`projective`]: Monte Carlo drivers producing
//!   [`report::ExperimentReport`]s.
//! * [`config`] and [`runner`]: declarative TOML configs and the run pipeline
//!   used by the `plurizero` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compact;
pub mod config;
pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod parallel;
pub mod poly;
pub mod projective;
pub mod quad;
pub mod report;
pub mod rng;
pub mod runner;
pub mod stats;
pub mod zeros;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Crate version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
