//! Truncated coefficient models of analytic reproducing kernels on the unit
//! disc, and the dynamics of the adjoint of multiplication by `z` on them.

// `!(x < y)` routes NaN to the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructions;
pub mod criteria;
pub mod error;
pub mod float;
pub mod kernel;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod seq;

pub use error::{Error, Result};
