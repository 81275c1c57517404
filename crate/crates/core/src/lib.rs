#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod filter;
pub mod functions;
pub mod hermite;
pub mod integrate;
pub mod io;
pub mod operators;
pub mod quadrature;
mod reduce;
pub mod validation;

pub use error::{Error, Result};
