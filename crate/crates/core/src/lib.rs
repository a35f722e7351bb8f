//! Numerical laboratory for mean-field spin glasses.
//!
//! Spherical p-spin / tensor PCA and Sherrington-Kirkpatrick / Z2
//! synchronization: replica-symmetric and RSB functionals, the Parisi PDE,
//! Kac-Rice landscape complexity, approximate message passing, and exact
//! small-instance oracles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amp;
pub mod error;
pub mod landscape;
pub mod numerics;
pub mod oracle;
pub mod par;
pub mod pspin;
pub mod sk;

pub use error::{Error, Result};
