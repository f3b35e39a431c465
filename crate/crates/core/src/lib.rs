// `!(x > 0.0)` is deliberate throughout: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dyadic;
pub mod error;
pub mod grid;
pub mod presets;
pub mod gramian;
pub mod semigroup;
pub mod semilinear;
pub mod steering;
pub mod verify;

pub use error::{Error, Result};
