//! Jost solutions and the coefficients `a`, `b`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::Jet;
use crate::string_core::{
    fundamental_system, propagate_backward, propagate_backward_scaled, ScaledState, Segment,
    StateVector, StringModel, TailModel,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `√w` with `arg w ∈ [0, 2π)`, so that the result has non-negative imaginary part.
pub fn sqrt_branch(w: Complex64) -> Complex64 {
    let mut theta = w.im.atan2(w.re);
    if theta < 0.0 {
        theta += 2.0 * std::f64::consts::PI;
    }
    Complex64::from_polar(w.norm().sqrt(), 0.5 * theta)
}

/// Series of `b` near `k = 0` for the linear tail, used where direct
/// evaluation loses digits to cancellation.
#[derive(Debug, Clone)]
struct SmallK {
    /// `b(k) ≈ Σ coeffs[n] k^(n + 2)`.
    coeffs: Vec<Complex64>,
    radius: f64,
}

/// Evaluator for `(a(k), b(k))` and the Jost data of one model. The model is
/// used in normalized form; scaling enters only through [`ScatteringPair::scaling`].
#[derive(Debug, Clone)]
pub struct ScatteringPair {
    model: StringModel,
    segments: Vec<Segment>,
    sqrt_alpha: f64,
    small_k: Option<SmallK>,
}

impl ScatteringPair {
    pub fn new(model: &StringModel) -> Result<Self> {
        model.validate()?;
        let segments = model.segments();
        let sqrt_alpha = model.alpha().map(f64::sqrt).unwrap_or(0.0);
        let mut pair = Self {
            model: model.clone(),
            segments,
            sqrt_alpha,
            small_k: None,
        };
        if model.tail == TailModel::Linear && !pair.segments.is_empty() {
            pair.small_k = Some(pair.small_k_series());
        }
        Ok(pair)
    }

    pub fn model(&self) -> &StringModel {
        &self.model
    }

    pub fn tail(&self) -> TailModel {
        self.model.tail
    }

    pub fn is_free(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn sqrt_alpha(&self) -> f64 {
        self.sqrt_alpha
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Spectral parameter belonging to momentum `k`.
    pub fn z_of_k(&self, k: Complex64) -> Complex64 {
        k * k + self.sqrt_alpha * self.sqrt_alpha
    }

    /// Momentum belonging to a spectral parameter (normalized string).
    pub fn k_of_z(&self, z: Complex64) -> Complex64 {
        sqrt_branch(z - self.sqrt_alpha * self.sqrt_alpha)
    }

    /// Jost state at `R+` as mantissa and logarithmic scale.
    fn jost_scaled(&self, k: Complex64) -> ScaledState {
        let r = self.model.r;
        let z = self.z_of_k(k);
        match self.model.tail {
            TailModel::Linear => {
                let f = Complex64::from_polar(1.0, k.re * r);
                ScaledState {
                    f,
                    f1: (I * k + k * k * r) * f,
                    log_scale: -k.im * r,
                }
            }
            TailModel::Moebius { .. } => {
                let sa = self.sqrt_alpha;
                let ln_s = (2.0 * sa * r).ln_1p();
                let p = I * k / (2.0 * sa) + 0.5;
                let f = Complex64::from_polar(1.0, p.im * ln_s);
                let f1 = f * ((I * k + sa) + z * r) / (1.0 + 2.0 * sa * r);
                ScaledState {
                    f,
                    f1,
                    log_scale: p.re * ln_s,
                }
            }
        }
    }

    fn check_k(k: Complex64) -> Result<()> {
        if !(k.re.is_finite() && k.im.is_finite()) {
            return Err(Error::NonFinite(format!("k = {k}")));
        }
        if k == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidArgument("k = 0 is excluded".into()));
        }
        Ok(())
    }

    pub fn jost_boundary(&self, k: Complex64) -> Result<StateVector> {
        Self::check_k(k)?;
        let s = self.jost_scaled(k);
        let factor = s.log_scale.exp();
        Ok(StateVector {
            position: self.model.r,
            f: s.f * factor,
            f1: s.f1 * factor,
        })
    }

    /// `(f(k, 0), f'(k, 0-))` as mantissas with a common log scale.
    pub fn jost_at_origin(&self, k: Complex64) -> Result<ScaledState> {
        Self::check_k(k)?;
        Ok(propagate_backward_scaled(
            &self.segments,
            self.z_of_k(k),
            self.jost_scaled(k),
        ))
    }

    /// `(a, b)` mantissas sharing the log scale of the returned state.
    pub fn ab_scaled(&self, k: Complex64) -> Result<(Complex64, Complex64, f64)> {
        let s = self.jost_at_origin(k)?;
        let (a, b) = self.ab_from_origin(k, s.f, s.f1);
        Ok((a, b, s.log_scale))
    }

    fn ab_from_origin(
        &self,
        k: Complex64,
        f0: Complex64,
        f0p: Complex64,
    ) -> (Complex64, Complex64) {
        let ik = I * k;
        let sa = self.sqrt_alpha;
        let a = ((ik - sa) * f0 + f0p) / (2.0 * ik);
        let b = ((ik + sa) * f0 - f0p) / (2.0 * ik);
        (a, b)
    }

    pub fn ab(&self, k: Complex64) -> Result<(Complex64, Complex64)> {
        let (a, b, l) = self.ab_scaled(k)?;
        let factor = l.exp();
        Ok((a * factor, b * factor))
    }

    /// `(a, b)` assembled from the fundamental system at `R` instead of
    /// backward propagation.
    pub fn ab_via_fundamental(&self, k: Complex64) -> Result<(Complex64, Complex64)> {
        Self::check_k(k)?;
        let fs = fundamental_system(&self.model, self.z_of_k(k))?;
        let j = self.jost_boundary(k)?;
        let f0 = fs.phi1 * j.f - fs.phi * j.f1;
        let f0p = -fs.theta1 * j.f + fs.theta * j.f1;
        Ok(self.ab_from_origin(k, f0, f0p))
    }

    fn small_k_series(&self) -> SmallK {
        const ORDER: usize = 7;
        let k = Jet::variable(Complex64::new(0.0, 0.0), ORDER);
        let r = self.model.r;
        let z = k * k;
        let f = k.scale(I * r).exp();
        let f1 = (k.scale(I) + z.scale(Complex64::new(r, 0.0))) * f;
        let (f0, f0p) = propagate_backward(&self.segments, z, f, f1);
        let numerator = k.scale(I) * f0 - f0p;
        // The coefficients of k^0..k^2 vanish identically.
        let coeffs: Vec<Complex64> = (3..=ORDER)
            .map(|n| numerator.coeff(n) / (2.0 * I))
            .collect();
        let mut radius: f64 = 1.0;
        for (n, c) in coeffs.iter().enumerate().skip(coeffs.len() - 2) {
            let norm = c.norm();
            if norm > 0.0 {
                radius = radius.min((1e-13 / norm).powf(1.0 / (n + 2) as f64));
            }
        }
        SmallK { coeffs, radius }
    }

    /// `log|a(k)|` for real `k > 0`, through `|a|² = 1 + |b|²`.
    pub fn log_abs_a(&self, k: f64) -> Result<f64> {
        if self.is_free() {
            return Ok(0.0);
        }
        if let Some(series) = &self.small_k {
            if k <= series.radius {
                let mut b = Complex64::new(0.0, 0.0);
                for c in series.coeffs.iter().rev() {
                    b = b * k + c;
                }
                let b = b * k * k;
                return Ok(0.5 * b.norm_sqr().ln_1p());
            }
        }
        let (_, b, l) = self.ab_scaled(Complex64::new(k, 0.0))?;
        let nb = b.norm();
        if nb == 0.0 {
            return Ok(0.0);
        }
        let log_b = nb.ln() + l;
        Ok(if log_b < 0.0 {
            0.5 * (2.0 * log_b).exp().ln_1p()
        } else {
            log_b + 0.5 * (-2.0 * log_b).exp().ln_1p()
        })
    }

    /// Reduced Jost data at `k = iκ`: positive factors dropped, returned as
    /// real mantissas `(f0, f0')` with a log scale, at `z = edge - κ²`.
    fn imaginary_axis_origin(&self, kappa: f64) -> ScaledState {
        let r = self.model.r;
        let sa = self.sqrt_alpha;
        let z = Complex64::new(sa * sa - kappa * kappa, 0.0);
        let start = match self.model.tail {
            TailModel::Linear => ScaledState {
                f: Complex64::new(1.0, 0.0),
                f1: Complex64::new(-kappa - kappa * kappa * r, 0.0),
                log_scale: 0.0,
            },
            TailModel::Moebius { .. } => ScaledState {
                f: Complex64::new(1.0 + 2.0 * sa * r, 0.0),
                f1: Complex64::new((sa - kappa) + (sa * sa - kappa * kappa) * r, 0.0),
                log_scale: 0.0,
            },
        };
        propagate_backward_scaled(&self.segments, z, start)
    }

    fn degree_bound(&self) -> f64 {
        4.0 * self.segments.len() as f64 + 4.0
    }

    fn reduce(&self, kappa: f64, mantissa: f64, log_scale: f64) -> f64 {
        if mantissa == 0.0 {
            return 0.0;
        }
        let log = mantissa.abs().ln() + log_scale - self.degree_bound() * kappa.ln_1p();
        mantissa.signum() * log.clamp(-700.0, 700.0).exp()
    }

    /// A real function with the sign of `a(iκ)` and the same zeros on `κ > 0`.
    pub fn a_imaginary_reduced(&self, kappa: f64) -> f64 {
        let s = self.imaginary_axis_origin(kappa);
        let g = (kappa + self.sqrt_alpha) * s.f.re - s.f1.re;
        self.reduce(kappa, g, s.log_scale)
    }

    /// A real function with the sign of `f(iκ, 0)` and the same zeros on `κ > 0`.
    pub fn jost_imaginary_reduced(&self, kappa: f64) -> f64 {
        let s = self.imaginary_axis_origin(kappa);
        self.reduce(kappa, s.f.re, s.log_scale)
    }

    /// Taylor jet of `a`: at `k = 0` of order 4 for the linear tail, at
    /// `k = i√α` of order 2 for the Möbius tail.
    pub fn a_jet(&self) -> Jet {
        let r = self.model.r;
        match self.model.tail {
            TailModel::Linear => {
                let k = Jet::variable(Complex64::new(0.0, 0.0), 5);
                let z = k * k;
                let f = k.scale(I * r).exp();
                let f1 = (k.scale(I) + z.scale(Complex64::new(r, 0.0))) * f;
                let (f0, f0p) = propagate_backward(&self.segments, z, f, f1);
                let numerator = k.scale(I) * f0 + f0p;
                numerator.div_by_variable().scale(1.0 / (2.0 * I))
            }
            TailModel::Moebius { .. } => {
                let sa = self.sqrt_alpha;
                let k = Jet::variable(I * sa, 2);
                let ik = k.scale(I);
                let z = k * k + k.lift(Complex64::new(sa * sa, 0.0));
                let s = 1.0 + 2.0 * sa * r;
                let ln_s = s.ln();
                let p = ik.scale(Complex64::new(1.0 / (2.0 * sa), 0.0))
                    + k.lift(Complex64::new(0.5, 0.0));
                let f = p.scale(Complex64::new(ln_s, 0.0)).exp();
                let bracket =
                    ik + k.lift(Complex64::new(sa, 0.0)) + z.scale(Complex64::new(r, 0.0));
                let f1 = f * bracket.scale(Complex64::new(1.0 / s, 0.0));
                let (f0, f0p) = propagate_backward(&self.segments, z, f, f1);
                let sa_j = k.lift(Complex64::new(sa, 0.0));
                let numerator = (ik - sa_j) * f0 + f0p;
                numerator.div(&ik.scale(Complex64::new(2.0, 0.0)))
            }
        }
    }
}

pub fn jost_boundary(model: &StringModel, k: Complex64) -> Result<StateVector> {
    ScatteringPair::new(model)?.jost_boundary(k)
}

pub fn scattering_ab(model: &StringModel, k: Complex64) -> Result<(Complex64, Complex64)> {
    ScatteringPair::new(model)?.ab(k)
}

pub fn a_jet(model: &StringModel) -> Result<Jet> {
    Ok(ScatteringPair::new(model)?.a_jet())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::string_core::{DiscreteMeasure, StepFunction};

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
    fn branch_has_non_negative_imaginary_part() {
        assert!((sqrt_branch(c(-1.0, 0.0)) - c(0.0, 1.0)).norm() < 1e-16);
        assert!((sqrt_branch(c(-1.0, -0.0)) - c(0.0, 1.0)).norm() < 1e-16);
        assert!(sqrt_branch(c(0.3, -2.0)).im > 0.0);
        assert!((sqrt_branch(c(4.0, 0.0)) - c(2.0, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn jost_boundary_examples() {
        let free = StringModel::free(TailModel::Linear);
        let j = jost_boundary(&free, c(0.0, 1.0)).unwrap();
        assert_eq!((j.f, j.f1), (c(1.0, 0.0), c(-1.0, 0.0)));
        let one = StringModel::new(
            TailModel::Linear,
            StepFunction::new(vec![0.0, 1.0], vec![0.0]),
            Default::default(),
        );
        let j = jost_boundary(&one, c(1.0, 0.0)).unwrap();
        let e = Complex64::from_polar(1.0, 1.0);
        assert!((j.f - e).norm() < 1e-15 && (j.f1 - c(1.0, 1.0) * e).norm() < 1e-15);
        let moeb = StringModel::free(TailModel::Moebius { alpha: 0.25 });
        let j = jost_boundary(&moeb, c(0.0, 1.0)).unwrap();
        assert!((j.f - c(1.0, 0.0)).norm() < 1e-15 && (j.f1 - c(-0.5, 0.0)).norm() < 1e-15);
        assert!(jost_boundary(&moeb, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn point_mass_coefficients() {
        for &k in &[0.3, 1.0, 2.5] {
            let (a, b) = scattering_ab(&point_mass(), c(k, 0.0)).unwrap();
            assert!((a - c(1.0, -k * k * k)).norm() < 1e-12);
            assert!((b - c(0.0, k * k * k)).norm() < 1e-12);
        }
    }

    #[test]
    fn free_models_are_reflectionless() {
        for tail in [TailModel::Linear, TailModel::Moebius { alpha: 0.7 }] {
            let (a, b) = scattering_ab(&StringModel::free(tail), c(1.3, 0.4)).unwrap();
            assert!((a - c(1.0, 0.0)).norm() < 1e-15 && b.norm() < 1e-15);
        }
    }

    #[test]
    fn small_k_series_matches_direct_evaluation() {
        let m = StringModel::new(
            TailModel::Linear,
            StepFunction::new(vec![0.0, 0.4, 1.1], vec![1.5, -0.5]),
            DiscreteMeasure::new(vec![0.7], vec![0.3]),
        );
        let pair = ScatteringPair::new(&m).unwrap();
        let series = pair.small_k.clone().unwrap();
        let k = 0.9 * series.radius;
        let (_, b) = pair.ab(c(k, 0.0)).unwrap();
        let direct = 0.5 * b.norm_sqr().ln_1p();
        let via = pair.log_abs_a(k).unwrap();
        assert!(
            (direct - via).abs() <= 1e-9 * direct.abs() + 1e-20,
            "{direct} vs {via}"
        );
    }

    #[test]
    fn point_mass_jet() {
        let j = a_jet(&point_mass()).unwrap();
        let expected = [
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, -1.0),
            c(0.0, 0.0),
        ];
        for (n, e) in expected.iter().enumerate() {
            assert!(
                (j.coeff(n) - e).norm() < 1e-14,
                "coefficient {n}: {}",
                j.coeff(n)
            );
        }
    }

    #[test]
    fn reduced_functions_on_point_mass() {
        let pair = ScatteringPair::new(&point_mass()).unwrap();
        // a(iκ) = 1 - κ³ changes sign at 1; f(iκ, 0) = 1 never vanishes.
        assert!(pair.a_imaginary_reduced(0.5) > 0.0 && pair.a_imaginary_reduced(1.5) < 0.0);
        assert!(pair.jost_imaginary_reduced(0.5) > 0.0 && pair.jost_imaginary_reduced(3.0) > 0.0);
    }
}
