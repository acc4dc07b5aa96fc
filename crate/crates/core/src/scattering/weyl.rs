//! Weyl-Titchmarsh function, spectral density and Herglotz diagnostics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::jost::{sqrt_branch, ScatteringPair};
use crate::error::{Error, Result};
use crate::string_core::{rescale_weyl, StringModel, TailModel};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub lambda: f64,
    pub rho: f64,
}

fn check_z(z: Complex64, edge: f64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite(format!("z = {z}")));
    }
    if z.im == 0.0 && (z.re >= edge || z.re == 0.0) {
        return Err(Error::BranchCut(format!("{z}")));
    }
    Ok(())
}

/// Explicit `m` of the unperturbed models: `i/√z` and `i/(√(z-α) + i√α)`.
pub fn model_weyl_reference(tail: TailModel, z: Complex64) -> Result<Complex64> {
    check_z(z, tail.edge())?;
    Ok(match tail {
        TailModel::Linear => I / sqrt_branch(z),
        TailModel::Moebius { alpha } => I / (sqrt_branch(z - alpha) + I * alpha.sqrt()),
    })
}

impl ScatteringPair {
    /// `m` of the normalized string, `f'(k, 0-)/(z f(k, 0))`.
    pub fn weyl_m_normalized(&self, z: Complex64) -> Result<Complex64> {
        check_z(z, self.tail().edge())?;
        let k = self.k_of_z(z);
        let s = self.jost_at_origin(k)?;
        if s.f.norm() <= 1e-14 * s.f1.norm() {
            return Err(Error::Pole(format!("{z}")));
        }
        Ok(s.f1 / (z * s.f))
    }

    /// `m(z) = η·m̃(ηz) + c` for the model's scaling.
    pub fn weyl_m(&self, z: Complex64) -> Result<Complex64> {
        let s = self.model().scaling;
        let mt = self.weyl_m_normalized(z * s.eta)?;
        Ok(rescale_weyl(mt, z, s))
    }

    /// Density of the normalized string at `λ` above the edge.
    pub fn density_normalized(&self, lambda: f64) -> Result<f64> {
        let edge = self.tail().edge();
        if !(lambda > edge) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "λ = {lambda} is not inside the essential spectrum ({edge}, ∞)"
            )));
        }
        let k = (lambda - edge).sqrt();
        let s = self.jost_at_origin(Complex64::new(k, 0.0))?;
        let mod2 = s.f.norm_sqr() * (2.0 * s.log_scale).exp();
        Ok(match self.tail() {
            TailModel::Linear => 1.0 / (std::f64::consts::PI * lambda.sqrt() * mod2),
            TailModel::Moebius { .. } => k / (std::f64::consts::PI * lambda * mod2),
        })
    }

    /// Density `ρ(λ) = η ρ̃(ηλ)` of the scaled string.
    pub fn density(&self, lambda: f64) -> Result<SpectralSample> {
        let eta = self.model().scaling.eta;
        let rho = eta * self.density_normalized(eta * lambda)?;
        Ok(SpectralSample { lambda, rho })
    }
}

pub fn weyl_m(model: &StringModel, z: Complex64) -> Result<Complex64> {
    ScatteringPair::new(model)?.weyl_m(z)
}

pub fn spectral_density(model: &StringModel, lambda: f64) -> Result<SpectralSample> {
    ScatteringPair::new(model)?.density(lambda)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HerglotzReport {
    pub points: usize,
    /// Points where `Im m < -1e-12`.
    pub flagged: Vec<(Complex64, Complex64)>,
    /// Largest `|m(z*) - m(z)*|` over the grid.
    pub max_conjugate_residual: f64,
    pub errors: Vec<String>,
}

impl HerglotzReport {
    pub fn passed(&self, conjugate_tol: f64) -> bool {
        self.flagged.is_empty()
            && self.errors.is_empty()
            && self.max_conjugate_residual <= conjugate_tol
    }
}

/// Checks positivity of `Im m` and conjugate symmetry for any evaluator.
pub fn herglotz_scan_with<F: Fn(Complex64) -> Result<Complex64>>(
    m: F,
    grid: &[Complex64],
) -> HerglotzReport {
    let mut report = HerglotzReport {
        points: grid.len(),
        flagged: Vec::new(),
        max_conjugate_residual: 0.0,
        errors: Vec::new(),
    };
    for &z in grid {
        if !(z.im > 0.0) {
            report
                .errors
                .push(format!("grid point {z} is not in the upper half-plane"));
            continue;
        }
        match (m(z), m(z.conj())) {
            (Ok(v), Ok(w)) => {
                if v.im < -1e-12 {
                    report.flagged.push((z, v));
                }
                let scale = v.norm().max(1.0);
                report.max_conjugate_residual = report
                    .max_conjugate_residual
                    .max((w - v.conj()).norm() / scale);
            }
            (Err(e), _) | (_, Err(e)) => report.errors.push(format!("{z}: {e}")),
        }
    }
    report
}

pub fn herglotz_scan(model: &StringModel, grid: &[Complex64]) -> Result<HerglotzReport> {
    let pair = ScatteringPair::new(model)?;
    Ok(herglotz_scan_with(|z| pair.weyl_m(z), grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::string_core::{DiscreteMeasure, ScalingParams, StepFunction};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn point_mass() -> StringModel {
        StringModel::new(
            TailModel::Linear,
            StepFunction::empty(),
            DiscreteMeasure::new(vec![0.0], vec![2.0]),
        )
    }

    #[test]
    fn reference_values() {
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!(
            (model_weyl_reference(TailModel::Linear, c(-4.0, 0.0)).unwrap() - c(0.5, 0.0)).norm()
                < 1e-15
        );
        let m = model_weyl_reference(TailModel::Moebius { alpha: 0.25 }, c(-1.0, 0.0)).unwrap();
        assert!((m - c(golden, 0.0)).norm() < 1e-15);
        let m =
            model_weyl_reference(TailModel::Moebius { alpha: 1.0 }, c(1.0 - 1e-14, 0.0)).unwrap();
        assert!((m - c(1.0, 0.0)).norm() < 1e-6);
        assert!(model_weyl_reference(TailModel::Linear, c(2.0, 0.0)).is_err());
    }

    #[test]
    fn weyl_m_examples() {
        assert!(
            (weyl_m(&StringModel::free(TailModel::Linear), c(-1.0, 0.0)).unwrap() - c(1.0, 0.0))
                .norm()
                < 1e-15
        );
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let m = weyl_m(
            &StringModel::free(TailModel::Moebius { alpha: 0.25 }),
            c(-1.0, 0.0),
        )
        .unwrap();
        assert!((m - c(golden, 0.0)).norm() < 1e-15);
        assert!((weyl_m(&point_mass(), c(-1.0, 0.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-14);
        assert!(matches!(
            weyl_m(&point_mass(), c(3.0, 0.0)),
            Err(Error::BranchCut(_))
        ));
    }

    #[test]
    fn pole_is_signalled() {
        // Step 2 on [0, 1) has an eigenvalue at -(3 + √5)/2.
        let m = StringModel::new(
            TailModel::Linear,
            StepFunction::new(vec![0.0, 1.0], vec![2.0]),
            Default::default(),
        );
        let lambda = -(3.0 + 5f64.sqrt()) / 2.0;
        assert!(matches!(weyl_m(&m, c(lambda, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn density_examples() {
        let pi = std::f64::consts::PI;
        let s = spectral_density(&StringModel::free(TailModel::Linear), 1.0).unwrap();
        assert!((s.rho - 1.0 / pi).abs() < 1e-15);
        let s =
            spectral_density(&StringModel::free(TailModel::Moebius { alpha: 0.25 }), 0.5).unwrap();
        assert!((s.rho - 1.0 / pi).abs() < 1e-15);
        let s = spectral_density(&point_mass(), 1.0).unwrap();
        assert!((s.rho - 1.0 / pi).abs() < 1e-14);
        assert!(spectral_density(&point_mass(), 0.0).is_err());
    }

    #[test]
    fn scaling_maps_m_and_density() {
        let base = point_mass();
        let scaled = base
            .clone()
            .with_scaling(ScalingParams { c: 0.5, eta: 2.0 });
        let z = c(0.3, 0.8);
        let expect = weyl_m(&base, z * 2.0).unwrap() * 2.0 + 0.5;
        assert!((weyl_m(&scaled, z).unwrap() - expect).norm() < 1e-14);
        let rho = spectral_density(&scaled, 1.5).unwrap().rho;
        assert!((rho - 2.0 * spectral_density(&base, 3.0).unwrap().rho).abs() < 1e-14);
    }

    #[test]
    fn herglotz_free_and_corrupted() {
        let grid = [c(0.0, 1.0), c(1.0, 1.0), c(-1.0, 1.0)];
        let r = herglotz_scan(&StringModel::free(TailModel::Linear), &grid).unwrap();
        assert!(r.passed(1e-12));
        let bad = herglotz_scan_with(|z| Ok(-I / sqrt_branch(z)), &grid);
        assert_eq!(bad.flagged.len(), 3);
    }
}
