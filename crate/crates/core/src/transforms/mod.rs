//! Reductions of Camassa-Holm spectral data and of δ′-interaction
//! Hamiltonians to string coefficients.

mod camassa_holm;
mod delta_prime;

pub use camassa_holm::{
    ch_condition_check, ch_to_string, ch_weyl, energy_measure, measure_transport_identity,
    substitution_identity, CHData, ChCondition, IdentityPair,
};
pub use delta_prime::{
    delta_prime_lt_check, delta_prime_to_string, DeltaPrimeData, DeltaPrimeLt, DistributionSamples,
};
