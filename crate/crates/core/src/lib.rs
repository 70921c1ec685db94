#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analytics;
pub mod error;
pub mod io;
pub mod numeric;
pub mod mixture;
pub mod sampler;
pub mod survival;

pub use error::{Error, Result};
