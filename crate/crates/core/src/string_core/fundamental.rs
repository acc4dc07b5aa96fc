use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::{ScalingParams, StringModel};
use super::transfer::propagate_forward;
use crate::error::{Error, Result};
use crate::numerics::{Jet, MAX_JET_ORDER};

/// `(θ, θ^[1], φ, φ^[1])` at `x = R+`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FundamentalSystem {
    pub theta: Complex64,
    pub theta1: Complex64,
    pub phi: Complex64,
    pub phi1: Complex64,
}

impl FundamentalSystem {
    pub fn wronskian(&self) -> Complex64 {
        self.theta * self.phi1 - self.phi * self.theta1
    }
}

pub fn fundamental_system(model: &StringModel, z: Complex64) -> Result<FundamentalSystem> {
    model.validate()?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite(format!("z = {z}")));
    }
    let segs = model.segments();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let (theta, theta1) = propagate_forward(&segs, z, one, zero);
    let (phi, phi1) = propagate_forward(&segs, z, zero, one);
    Ok(FundamentalSystem {
        theta,
        theta1,
        phi,
        phi1,
    })
}

/// Jets in `z` around `base` of `(θ, θ^[1], φ, φ^[1])` at `R+`.
pub fn fundamental_jet(model: &StringModel, base: Complex64, order: usize) -> Result<[Jet; 4]> {
    if !(1..=6).contains(&order) || order > MAX_JET_ORDER {
        return Err(Error::InvalidArgument(format!(
            "jet order must lie in [1, 6], got {order}"
        )));
    }
    model.validate()?;
    let segs = model.segments();
    let z = Jet::variable(base, order);
    let one = z.lift(Complex64::new(1.0, 0.0));
    let zero = z.lift(Complex64::new(0.0, 0.0));
    let (theta, theta1) = propagate_forward(&segs, z, one, zero);
    let (phi, phi1) = propagate_forward(&segs, z, zero, one);
    Ok([theta, theta1, phi, phi1])
}

/// First and second `z`-derivatives at `z = 0` of the fundamental system at `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormJets {
    pub theta_dot: f64,
    pub theta1_dot: f64,
    pub phi_dot: f64,
    pub phi1_dot: f64,
    pub theta_ddot: f64,
    pub theta1_ddot: f64,
    pub phi1_ddot: f64,
}

/// Piecewise-exact moments of a step function and a discrete measure on `[0, R]`.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct StepMoments {
    pub int_w: f64,
    pub int_int_w: f64,
    pub int_w_t: f64,
    pub int_w2: f64,
    pub int_int_w2: f64,
    pub int_w2_t: f64,
    pub mass: f64,
    pub mass_r_minus_s: f64,
    pub mass_s: f64,
}

pub(crate) fn step_moments(model: &StringModel) -> StepMoments {
    let r = model.r;
    let mut m = StepMoments::default();
    for (x0, x1, w) in model.step.intervals() {
        let len = x1 - x0;
        // (R-x0)² - (R-x1)² = len·(2R - x0 - x1), free of cancellation.
        let outer = 0.5 * len * (2.0 * r - x0 - x1);
        let first = 0.5 * len * (x0 + x1);
        m.int_w += w * len;
        m.int_int_w += w * outer;
        m.int_w_t += w * first;
        m.int_w2 += w * w * len;
        m.int_int_w2 += w * w * outer;
        m.int_w2_t += w * w * first;
    }
    for (s, mass) in model.upsilon.atoms() {
        m.mass += mass;
        m.mass_r_minus_s += mass * (r - s);
        m.mass_s += mass * s;
    }
    m
}

pub fn closed_form_jets(model: &StringModel) -> Result<ClosedFormJets> {
    model.validate()?;
    let m = step_moments(model);
    Ok(ClosedFormJets {
        theta_dot: -m.int_w,
        theta1_dot: 0.0,
        phi_dot: m.int_int_w - m.int_w_t,
        phi1_dot: m.int_w,
        theta_ddot: m.int_w * m.int_w - 2.0 * m.int_int_w2 - 2.0 * m.mass_r_minus_s,
        theta1_ddot: -2.0 * m.int_w2 - 2.0 * m.mass,
        phi1_ddot: m.int_w * m.int_w - 2.0 * m.int_w2_t - 2.0 * m.mass_s,
    })
}

/// `m(z) = η·m̃(ηz) + c`, where `mtilde` is the value `m̃(ηz)`.
pub fn rescale_weyl(mtilde: Complex64, _z: Complex64, scaling: ScalingParams) -> Complex64 {
    mtilde * scaling.eta + scaling.c
}

/// Inverse of [`rescale_weyl`].
pub fn unscale_weyl(m: Complex64, scaling: ScalingParams) -> Complex64 {
    (m - scaling.c) / scaling.eta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::string_core::{DiscreteMeasure, StepFunction, TailModel};

    fn unit_step() -> StringModel {
        StringModel::new(
            TailModel::Linear,
            StepFunction::new(vec![0.0, 1.0], vec![1.0]),
            DiscreteMeasure::default(),
        )
    }

    #[test]
    fn zero_energy_values() {
        let m = unit_step();
        let fs = fundamental_system(&m, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(fs.theta, Complex64::new(1.0, 0.0));
        assert_eq!(fs.theta1, Complex64::new(0.0, 0.0));
        assert_eq!(fs.phi, Complex64::new(1.0, 0.0));
        assert_eq!(fs.phi1, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn unit_step_at_z_one() {
        let fs = fundamental_system(&unit_step(), Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(fs.theta, Complex64::new(0.0, 0.0));
        assert_eq!(fs.theta1, Complex64::new(-1.0, 0.0));
        assert_eq!(fs.phi, Complex64::new(1.0, 0.0));
        assert_eq!(fs.phi1, Complex64::new(2.0, 0.0));
        assert_eq!(fs.wronskian(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn pure_tail_is_identity() {
        let fs = fundamental_system(
            &StringModel::free(TailModel::Linear),
            Complex64::new(2.0, 3.0),
        )
        .unwrap();
        assert_eq!(
            (fs.theta, fs.theta1, fs.phi, fs.phi1),
            (1.0.into(), 0.0.into(), 0.0.into(), 1.0.into())
        );
        let jets = fundamental_jet(
            &StringModel::free(TailModel::Linear),
            Complex64::new(0.0, 0.0),
            3,
        )
        .unwrap();
        assert!(jets
            .iter()
            .all(|j| (1..=3).all(|n| j.coeff(n) == Complex64::new(0.0, 0.0))));
    }

    #[test]
    fn closed_form_examples() {
        let cf = closed_form_jets(&unit_step()).unwrap();
        assert_eq!(cf.theta_dot, -1.0);
        assert_eq!(cf.phi1_dot, 1.0);
        assert_eq!(cf.theta1_ddot, -2.0);
        let atoms = StringModel::new(
            TailModel::Linear,
            StepFunction::new(vec![0.0, 1.0], vec![0.0]),
            DiscreteMeasure::new(vec![0.5], vec![3.0]),
        );
        assert_eq!(closed_form_jets(&atoms).unwrap().theta1_ddot, -6.0);
    }

    #[test]
    fn jet_order_is_checked() {
        assert!(fundamental_jet(&unit_step(), Complex64::new(0.0, 0.0), 0).is_err());
        assert!(fundamental_jet(&unit_step(), Complex64::new(0.0, 0.0), 7).is_err());
    }

    #[test]
    fn rescale_examples() {
        let s = ScalingParams { c: 2.0, eta: 3.0 };
        let z = Complex64::new(0.5, 1.0);
        assert_eq!(
            rescale_weyl(Complex64::new(1.0, 0.0), z, s),
            Complex64::new(5.0, 0.0)
        );
        let m = Complex64::new(0.3, 0.7);
        assert_eq!(rescale_weyl(m, z, ScalingParams::default()), m);
        assert!((unscale_weyl(rescale_weyl(m, z, s), s) - m).norm() < 1e-15);
    }
}
