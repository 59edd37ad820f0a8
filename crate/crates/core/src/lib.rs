//! Closed correlation-function dynamics of dissipatively cooled spin-1/2 lattices.
//!
//! The crate assembles linear generators for two-point spin correlations driven by
//! the bond operator `Q_xy = ½(s⁺_x + s⁺_y)(s⁻_x − s⁻_y)`, optionally with a transverse
//! field or thermal spin flips, and checks them against a brute-force Lindblad solver.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod correlation;
pub mod error;
pub mod jump_algebra;
pub mod lattice;
pub mod linalg;
pub mod oracle;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
