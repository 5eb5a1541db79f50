//! Unitary-averaged permanent statistics for lossy linear-optical networks.
//!
//! The crate answers one family of questions: given an `m`-mode network drawn
//! from the circular unitary ensemble, with an intensity transmission `t`,
//! what is the average probability of an `n`-fold coincidence count, how does
//! it scale with `n`, and how well does a finite Monte-Carlo ensemble
//! reproduce it?
//!
//! Layout:
//!
//! - [`matrix`] — dense complex matrices, exact permanents (naive oracle and
//!   Gray-code Ryser), and the permanental polynomial `perm(xI - T)`.
//! - [`haar`] — reproducible CUE sampling (Ginibre + QR with phase
//!   correction) and the lossy transmission matrix `sqrt(t) * U`.
//! - [`exact`] — closed-form ensemble averages in log domain: coincidence
//!   probability, grouped-channel bound, averaged permanental-polynomial
//!   products, characteristic and generating functions.
//! - [`asymptotics`] — the four large-`n` scaling laws.
//! - [`montecarlo`] — brute-force ensemble averaging with sub-ensemble
//!   (batch-means) error bars.
//! - [`output`] / [`figures`] — machine-readable records and figure data.

pub mod asymptotics;
pub mod error;
pub mod exact;
pub mod figures;
pub mod haar;
pub mod matrix;
pub mod montecarlo;
pub mod output;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, SubmatrixSpec};
