//! Approximately dual frames: finite-dimensional frame operators and their
//! perturbation calculus, exactly evaluable Gabor windows, certified
//! estimators for Gabor duality defects, and independent numerical oracles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cases;
pub mod error;
pub mod frame;
pub mod gabor;
pub mod lattice;
pub mod policy;
pub mod quadrature;
pub mod scan;
pub mod verify;
pub mod windows;

pub use error::{Error, Result};
pub use policy::TruncationPolicy;
