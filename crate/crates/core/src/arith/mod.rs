//! Exact scalar arithmetic: rationals, cyclotomic numbers, integer normal forms.

pub mod cyclotomic;
pub mod matrix;
pub mod nt;
pub mod rational;
pub mod rootsum;
pub mod snf;
pub mod sqrt;

pub use cyclotomic::CycNumber;
pub use matrix::CycMatrix;
pub use rational::Rational;
pub use rootsum::RootSum;
pub use snf::{smith_normal_form, SnfResult};
pub use sqrt::{pow_rational, sqrt_int};
