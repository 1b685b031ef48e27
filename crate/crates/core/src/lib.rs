//! Exact computation of invariant differential forms on homogeneous vector
//! bundles: coefficient ring, exterior algebra, homogeneous setups, letters and
//! contractions, dictionary generation, and a small configuration language.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod number;
pub mod poly;
pub mod forms;
pub mod linalg;
pub mod ring;
pub mod setup;
pub mod letters;
pub mod dictionary;
pub mod expr;
pub mod config;
pub mod report;
pub mod tasks;

pub use error::{Error, Result};
