//! Desk-scale computational laboratory for correlation sums
//! `Σ_{n≤X} f(n) λ_φ(n+h)` between multiplicative functions and Hecke
//! eigenform coefficients.
//!
//! The crate is organised around eight subsystems:
//!
//! * [`primes`] — segmented sieves, smallest-prime-factor tables, Mertens sums;
//! * [`forms`] — exact integer q-expansions of the six one-dimensional level-1
//!   eigenforms, normalized coefficient tables, Satake angles, symmetric-power
//!   and Rankin–Selberg square tables;
//! * [`multfun`] — a generic multiplicative-function engine plus the growth
//!   hypothesis checkers that delimit the admissible class of `f`;
//! * [`lseries`] — truncated Dirichlet-series algebra, Dirichlet characters,
//!   and coefficient-level L-function identity verification;
//! * [`correlation`] — the correlation sums themselves, Wilton sums, smoothed
//!   shifted convolutions, and the bilinear (BKSZ) decomposition harness;
//! * [`sieve`] — sifted Rankin–Selberg sums, arithmetic-progression sums with
//!   main-term comparison, sieve densities, and smooth sandwich weights;
//! * [`predict`] — the probabilistic model: local expectations, singular
//!   series, Sato–Tate mean-value exponents, and Wirsing-type fits;
//! * [`coeffio`] — the coefficient-table file formats (text and binary).
//!
//! Everything is deterministic: long floating sums use compensated block
//! summation with a fixed reduction tree, so results do not depend on the
//! number of worker threads.

pub mod coeffio;
pub mod correlation;
pub mod error;
pub mod forms;
pub mod lseries;
pub mod multfun;
pub mod predict;
pub mod primes;
pub mod selftest;
pub mod sieve;
pub mod util;

pub use error::{Error, Result};
