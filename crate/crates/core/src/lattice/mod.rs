//! Lattices and their (rescaled) discriminant forms.

pub mod discform;
pub mod gram;

pub use discform::{CosetId, DiscriminantForm, DEFAULT_ORDER_CAP};
pub use gram::Lattice;
