// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod extension;
pub mod filter;
pub mod imd;
pub mod series;
pub mod spline;
pub mod io;
