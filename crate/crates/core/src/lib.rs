//! Exact score-sphericity tests with controlled, data-driven model choice.
//!
//! Linear scores `z = M d` are built from a design-projected data matrix `M`
//! (raw data for the one-group design, column-centered data for the two-group
//! and correlation designs, `Q X` for a general linear design). Weight vectors
//! `d` may depend on anything in the total sums-of-products matrix `M'M`; each
//! score is then tested for a spherical distribution with an exact beta test,
//! and ordered scores are run through sequential procedures that keep the
//! familywise type I error.
//!
//! The crate is `no_std` and only needs `alloc`. IO, the command-line front
//! end and the parallel simulation driver live in `scoresphere-cli`.
//!
//! Modules:
//! * [`linalg`]: dense column-major matrices, centering, sums of products,
//!   projection pairs, symmetric and dual (Gram-side) eigensolvers.
//! * [`beta`]: regularized incomplete beta, quantiles, p-values, plus the
//!   chi-square and Kolmogorov tails used by the Wilks and KS checks.
//! * [`score_tests`]: classical, spherical mean-value and score-sphericity
//!   tests for all designs.
//! * [`model_choice`]: PCA / diagonal / column-sum / gene-set weights and the
//!   sequential procedures.
//! * [`mc`]: seeded Monte Carlo kernels that verify the exactness claims.

#![cfg_attr(not(test), no_std)]
#![warn(missing_debug_implementations)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

#[macro_use]
extern crate alloc;

pub mod beta;
mod error;
pub mod linalg;
pub mod mc;
pub mod model_choice;

pub use error::{Error, ErrorKind, Result};
pub use linalg::{DataMatrix, Design, Matrix, ProjectionPair};
