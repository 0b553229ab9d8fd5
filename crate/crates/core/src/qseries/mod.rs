//! Formal q-expansion engine.

pub mod mixed;
pub mod series;
pub mod theta;
pub mod vvmf;

pub use mixed::{
    hecke_prefactor, pairing, phase_sum, scalar_hecke, scalar_hecke_literal, scalar_u,
    MixedQSeries, SumMode,
};
pub use series::{Mismatch, QSeries, VVQSeries, Weight};
pub use theta::{
    brute_force_counts, theta_counts, theta_rescaling_identity, theta_series, vv_theta,
    RescalingCase,
};
