//! Estimation of integrated volatility for discretely observed Itô
//! semimartingales with jumps, and numerical checks of the minimax rate.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod io;
pub mod minimax;
pub mod models;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
