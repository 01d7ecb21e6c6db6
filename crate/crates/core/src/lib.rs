#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::should_implement_trait)]

pub mod autodiff;
pub mod biharmonic;
pub mod cli;
mod error;
pub mod expr;
pub mod geometry;
pub mod golden;
pub mod kappa;
pub mod submersion;

pub use error::{Error, Result};
