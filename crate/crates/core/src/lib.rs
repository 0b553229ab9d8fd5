//! Exact Weil representations and Hecke operators on vector-valued modular forms.
//!
//! All arithmetic is exact: rationals are arbitrary precision and every
//! complex number that appears lives in a cyclotomic field.

#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod error;
pub mod hecke;
pub mod lattice;
pub mod qseries;
pub mod suites;
pub mod weil;

pub use arith::{CycNumber, Rational};
pub use error::{Error, Result};
