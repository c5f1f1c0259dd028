//! Fractional Hardy-type operators on products of Euclidean spaces:
//! closed-form sharp operator-norm constants, extremizer families, and a
//! quadrature harness that verifies the constants are bounds and are
//! attained.

pub mod cli;
pub mod constants;
pub mod error;
pub mod operator;
pub mod params;
pub mod quadrature;
pub mod special;
pub mod verify;

pub use error::{HardyError, Result};
