//! Exact computations with matrix orthogonal polynomials and the algebra of
//! matrix differential operators that have them as eigenfunctions.

pub mod arith;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod fourier;
pub mod opalg;
pub mod parallel;
pub mod reproduce;
pub mod structure;
pub mod specio;
pub mod weights;

pub use error::{Error, Result};
