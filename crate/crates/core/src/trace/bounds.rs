//! Lieb-Thirring type eigenvalue bounds, absolutely continuous spectrum
//! bounds and the Jensen lower bound on spectral mass.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::norms::perturbation_norms;
use crate::error::{Error, Result};
use crate::numerics::{adaptive_integrate, Upper};
use crate::scattering::ScatteringPair;
use crate::string_core::{StringModel, TailModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            holds: lhs <= rhs + 1e-12 * rhs.abs().max(1.0),
        }
    }
}

/// Eigenvalues of the normalized string.
fn normalized_eigenvalues(model: &StringModel) -> Result<Vec<f64>> {
    Ok(ScatteringPair::new(&model.normalized())?
        .bound_states(None, 1e-14)?
        .eigenvalues)
}

/// `(4/3) Σ |λ|^{-3/2} ≤ n0`.
pub fn lt_check_f0(model: &StringModel) -> Result<BoundCheck> {
    if model.tail != TailModel::Linear {
        return Err(Error::InvalidArgument(
            "lt_check_f0 needs a linear tail".into(),
        ));
    }
    lt_check_f0_with(model, &normalized_eigenvalues(model)?)
}

pub fn lt_check_f0_with(model: &StringModel, eigenvalues: &[f64]) -> Result<BoundCheck> {
    let rhs = perturbation_norms(&model.normalized())?.n0;
    let lhs = eigenvalues
        .iter()
        .fold(0.0, |acc, l| acc + 4.0 / 3.0 * l.abs().powf(-1.5));
    Ok(BoundCheck::new(lhs, rhs))
}

/// `(4/(3α^{3/2})) [Σ_{λ<0} (1 - λ/α)^{-3/2} + Σ_{0<λ<α} (1 - λ/α)^{3/2}] ≤ a2`.
pub fn lt_check_falpha(model: &StringModel) -> Result<BoundCheck> {
    let TailModel::Moebius { alpha } = model.tail else {
        return Err(Error::InvalidArgument(
            "lt_check_falpha needs a Möbius tail".into(),
        ));
    };
    let rhs = perturbation_norms(&model.normalized())?.a2;
    let mut sum = 0.0;
    for l in normalized_eigenvalues(model)? {
        let base = 1.0 - l / alpha;
        sum += if l < 0.0 {
            base.powf(-1.5)
        } else {
            base.powf(1.5)
        };
    }
    Ok(BoundCheck::new(4.0 / (3.0 * alpha.powf(1.5)) * sum, rhs))
}

fn check_omega(lo: f64, hi: f64, edge: f64) -> Result<()> {
    if !(lo > edge && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Ω = [{lo}, {hi}] must be a non-degenerate interval inside ({edge}, ∞)"
        )));
    }
    Ok(())
}

/// Integral bound on `log ρ` over a compact `Ω` inside the essential spectrum.
pub fn ac_bound_check(model: &StringModel, omega_lo: f64, omega_hi: f64) -> Result<BoundCheck> {
    let model = model.normalized();
    let pair = ScatteringPair::new(&model)?;
    let edge = model.tail.edge();
    check_omega(omega_lo, omega_hi, edge)?;
    let norms = perturbation_norms(&model)?;
    let rho = |l: f64| pair.density_normalized(l).unwrap_or(f64::NAN);
    let (value, rhs) = match model.tail {
        TailModel::Linear => {
            let c = 4.0 * PI / (omega_lo * omega_lo);
            let f = |l: f64| (rho(l) * c * l.powf(2.5)).ln() * l.powf(-2.5);
            (
                adaptive_integrate(f, omega_lo, Upper::Finite(omega_hi), 1e-11)?.value,
                norms.n0,
            )
        }
        TailModel::Moebius { alpha } => {
            let f = |l: f64| {
                let s = (l - alpha).sqrt();
                (rho(l) * 4.0 * PI * l.powi(3) / (alpha * alpha * s)).ln() * s / l.powi(3)
            };
            (
                adaptive_integrate(f, omega_lo, Upper::Finite(omega_hi), 1e-11)?.value,
                norms.a2,
            )
        }
    };
    Ok(BoundCheck::new(-value / PI, rhs))
}

/// Lower bound on the spectral mass of `Ω` from Jensen's inequality.
pub fn jensen_mu_lower(
    omega_lo: f64,
    omega_hi: f64,
    rhs_norm: f64,
    tail: TailModel,
) -> Result<f64> {
    check_omega(omega_lo, omega_hi, tail.edge())?;
    if !(rhs_norm >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "norm must be non-negative, got {rhs_norm}"
        )));
    }
    Ok(match tail {
        TailModel::Linear => {
            let c = 4.0 * PI / (omega_lo * omega_lo);
            let d = (2.0 / 3.0) * (omega_lo.powf(-1.5) - omega_hi.powf(-1.5)) / c;
            d * (-PI * rhs_norm / (c * d)).exp()
        }
        TailModel::Moebius { alpha } => {
            let f = |l: f64| alpha * alpha * (l - alpha).sqrt() / (4.0 * PI * l.powi(3));
            let d = adaptive_integrate(f, omega_lo, Upper::Finite(omega_hi), 1e-14)?.value;
            d * (-alpha * alpha * rhs_norm / (4.0 * d)).exp()
        }
    })
}

/// `∫_Ω ρ(λ) dλ` for the normalized string.
pub fn spectral_mass(model: &StringModel, omega_lo: f64, omega_hi: f64) -> Result<f64> {
    let model = model.normalized();
    let pair = ScatteringPair::new(&model)?;
    check_omega(omega_lo, omega_hi, model.tail.edge())?;
    let r = adaptive_integrate(
        |l| pair.density_normalized(l).unwrap_or(f64::NAN),
        omega_lo,
        Upper::Finite(omega_hi),
        1e-12,
    )?;
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::string_core::{DiscreteMeasure, StepFunction};

    #[test]
    fn lt_examples() {
        let free = lt_check_f0(&StringModel::free(TailModel::Linear)).unwrap();
        assert_eq!((free.lhs, free.rhs, free.holds), (0.0, 0.0, true));
        let step = StringModel::new(
            TailModel::Linear,
            StepFunction::new(vec![0.0, 1.0], vec![2.0]),
            Default::default(),
        );
        let r = lt_check_f0(&step).unwrap();
        let expected = 4.0 / 3.0 * ((3.0 + 5f64.sqrt()) / 2.0).powf(-1.5);
        assert!((r.lhs - expected).abs() < 1e-12);
        assert!((r.lhs - 0.3147).abs() < 1e-4);
        assert!((r.rhs - 7.0 / 3.0).abs() < 1e-15 && r.holds);
        let pm = StringModel::new(
            TailModel::Linear,
            StepFunction::empty(),
            DiscreteMeasure::new(vec![0.0], vec![2.0]),
        );
        let r = lt_check_f0(&pm).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 2.0));
        let r = lt_check_falpha(&StringModel::free(TailModel::Moebius { alpha: 0.3 })).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn ac_bound_on_free_models_is_non_positive() {
        let r = ac_bound_check(&StringModel::free(TailModel::Linear), 1.0, 2.0).unwrap();
        assert!(r.lhs <= 0.0 && r.holds);
        let r = ac_bound_check(
            &StringModel::free(TailModel::Moebius { alpha: 0.25 }),
            0.5,
            2.0,
        )
        .unwrap();
        assert!(r.lhs <= 0.0 && r.holds);
        assert!(ac_bound_check(&StringModel::free(TailModel::Linear), 0.0, 2.0).is_err());
    }

    #[test]
    fn ac_bound_point_mass() {
        let pm = StringModel::new(
            TailModel::Linear,
            StepFunction::empty(),
            DiscreteMeasure::new(vec![0.0], vec![2.0]),
        );
        assert!(ac_bound_check(&pm, 1.0, 2.0).unwrap().holds);
    }

    #[test]
    fn jensen_examples() {
        let d = jensen_mu_lower(1.0, 2.0, 0.0, TailModel::Linear).unwrap();
        let expected = (2.0 / 3.0) * (1.0 - 2f64.powf(-1.5)) / (4.0 * PI);
        assert!((d - expected).abs() < 1e-16);
        assert!((d - 0.0342972).abs() < 1e-5);
        let b1 = jensen_mu_lower(1.0, 2.0, 1.0, TailModel::Linear).unwrap();
        let b2 = jensen_mu_lower(1.0, 2.0, 10.0, TailModel::Linear).unwrap();
        assert!(d > b1 && b1 > b2 && b2 > 0.0);
        assert!(jensen_mu_lower(2.0, 1.0, 0.0, TailModel::Linear).is_err());
    }

    #[test]
    fn free_spectral_mass() {
        // ∫_1^2 dλ/(π√λ) = 2(√2 - 1)/π
        let m = spectral_mass(&StringModel::free(TailModel::Linear), 1.0, 2.0).unwrap();
        assert!((m - 2.0 * (2f64.sqrt() - 1.0) / PI).abs() < 1e-12);
    }
}
