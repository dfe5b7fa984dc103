//! Linear-rational term-structure models.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curvespace;
pub mod error;
pub mod hjm;
pub mod linalg;
pub mod manifold;
pub mod projection;
pub mod quadrature;
pub mod simulate;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
