//! Jost solutions, scattering coefficients, `m`, spectral density and bound states.

mod bound_states;
mod jost;
mod weyl;

pub use bound_states::{bound_states, find_a_zeros, find_eigenvalues, BoundStateSet};
pub use jost::{a_jet, jost_boundary, scattering_ab, sqrt_branch, ScatteringPair};
pub use weyl::{
    herglotz_scan, herglotz_scan_with, model_weyl_reference, spectral_density, weyl_m,
    HerglotzReport, SpectralSample,
};
