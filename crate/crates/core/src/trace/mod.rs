//! Sum rules, Lieb-Thirring type bounds and absolutely continuous spectrum bounds.

mod bounds;
mod identities;
mod norms;

pub use bounds::{
    ac_bound_check, jensen_mu_lower, lt_check_f0, lt_check_f0_with, lt_check_falpha, spectral_mass,
    BoundCheck,
};
pub use identities::{
    log_a_integral, verify_trace_f0, verify_trace_falpha, F_function, Identity,
    QuadratureDiagnostics, TraceReport, Weight,
};
pub use norms::{moebius_integral, perturbation_norms, PerturbationNorms};
