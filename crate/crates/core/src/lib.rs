//! Numerical set-valued integration on [0, 1].
//!
//! Convex compact bodies in dimension ≤ 3 are integrated against multifunctions
//! F: [0,1] → ck(ℝⁿ) with four constructions: McShane and Birkhoff Riemann-type
//! sums over tagged partitions, and Pettis and Aumann integrals built from
//! support functions and selections. Every result carries an error estimate
//! and a refinement trace, and [`integrators::compare_all`] cross-checks the
//! four methods against each other.

// `!(x >= 0.0)` is how NaN gets rejected along with negatives.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod domain;
pub mod error;
pub mod geometry;
pub mod integrators;
pub mod multifunctions;
pub mod oracle;

pub use error::{Error, Result};
