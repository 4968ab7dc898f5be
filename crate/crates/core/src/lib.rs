// `!(x > 0.0)` style guards deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod airy;
pub mod check;
pub mod cli;
pub mod error;
pub mod finite_n;
pub mod laxpair;
pub mod montecarlo;
pub mod numerics;
pub mod painleve;
pub mod scaling;

pub use error::{Error, Result};
