//! Closed-form perturbation norms of exact models.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::string_core::{StringModel, TailModel};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerturbationNorms {
    /// `∫|W - x|² dx + υ([0, R])`; meaningful for the linear tail.
    pub n0: f64,
    /// `∫(W - W_α) dx`; zero for the linear tail.
    pub a1: f64,
    /// `∫|W - W_α|²(1 + 2√α x) dx + ∫(1 + 2√α x) dυ`; zero for the linear tail.
    pub a2: f64,
}

/// `∫_{x0}^{x1} (x - w)² dx` without cancellation.
fn square_distance(x0: f64, x1: f64, w: f64) -> f64 {
    let (d0, d1) = (x0 - w, x1 - w);
    (x1 - x0) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0
}

/// `∫_0^x t^p / (1 + βt) dt` for `p ∈ {1, 2}`.
fn moebius_moment(p: i32, beta: f64, x: f64) -> f64 {
    if beta * x < 0.3 {
        moment_series(p, beta, x)
    } else {
        moment_closed(p, beta, x)
    }
}

fn moment_series(p: i32, beta: f64, x: f64) -> f64 {
    let y = beta * x;
    let mut sum = 0.0;
    let mut term = x.powi(p + 1);
    for n in 0..60 {
        sum += term / (n + p + 1) as f64;
        term *= -y;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn moment_closed(p: i32, beta: f64, x: f64) -> f64 {
    let y = beta * x;
    if p == 1 {
        (y - y.ln_1p()) / (beta * beta)
    } else {
        (0.5 * y * y - y + y.ln_1p()) / (beta * beta * beta)
    }
}

/// `∫_0^x W_α(t) dt` for the Möbius tail.
pub fn moebius_integral(alpha: f64, x: f64) -> f64 {
    moebius_moment(1, 2.0 * alpha.sqrt(), x)
}

pub fn perturbation_norms(model: &StringModel) -> Result<PerturbationNorms> {
    model.validate()?;
    let mass = model.upsilon.total();
    let mut out = PerturbationNorms {
        n0: mass,
        ..Default::default()
    };
    for (x0, x1, w) in model.step.intervals() {
        out.n0 += square_distance(x0, x1, w);
    }
    if let TailModel::Moebius { alpha } = model.tail {
        let beta = 2.0 * alpha.sqrt();
        let mut int_w = 0.0;
        let mut a2 = 0.0;
        for (x0, x1, w) in model.step.intervals() {
            let len = x1 - x0;
            let first = 0.5 * len * (x0 + x1);
            int_w += w * len;
            a2 += w * w * (len + beta * first) - 2.0 * w * first + moebius_moment(2, beta, x1)
                - moebius_moment(2, beta, x0);
        }
        for (s, m) in model.upsilon.atoms() {
            a2 += m * (1.0 + beta * s);
        }
        out.a1 = int_w - moebius_moment(1, beta, model.r);
        out.a2 = a2;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{adaptive_integrate, Upper};
    use crate::string_core::{DiscreteMeasure, StepFunction};

    #[test]
    fn examples() {
        assert_eq!(
            perturbation_norms(&StringModel::free(TailModel::Linear))
                .unwrap()
                .n0,
            0.0
        );
        let pm = StringModel::new(
            TailModel::Linear,
            StepFunction::empty(),
            DiscreteMeasure::new(vec![0.0], vec![2.0]),
        );
        assert_eq!(perturbation_norms(&pm).unwrap().n0, 2.0);
        let st = StringModel::new(
            TailModel::Linear,
            StepFunction::new(vec![0.0, 1.0], vec![2.0]),
            Default::default(),
        );
        assert!((perturbation_norms(&st).unwrap().n0 - 7.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn moebius_norms_match_quadrature() {
        let alpha: f64 = 0.3;
        let beta = 2.0 * alpha.sqrt();
        let m = StringModel::new(
            TailModel::Moebius { alpha },
            StepFunction::new(vec![0.0, 0.05, 1.2, 2.0], vec![0.7, -1.1, 0.4]),
            DiscreteMeasure::new(vec![0.5, 2.0], vec![0.3, 1.2]),
        );
        let n = perturbation_norms(&m).unwrap();
        let wa = |x: f64| x / (1.0 + beta * x);
        let mut a1 = 0.0;
        let mut a2 = 0.3 * (1.0 + beta * 0.5) + 1.2 * (1.0 + beta * 2.0);
        for (x0, x1, w) in m.step.intervals() {
            a1 += adaptive_integrate(|x| w - wa(x), x0, Upper::Finite(x1), 1e-15)
                .unwrap()
                .value;
            a2 += adaptive_integrate(
                |x| (w - wa(x)).powi(2) * (1.0 + beta * x),
                x0,
                Upper::Finite(x1),
                1e-15,
            )
            .unwrap()
            .value;
        }
        assert!((n.a1 - a1).abs() < 1e-13, "{} vs {a1}", n.a1);
        assert!((n.a2 - a2).abs() < 1e-13, "{} vs {a2}", n.a2);
    }

    #[test]
    fn series_and_closed_form_agree() {
        for &beta in &[0.2, 1.0] {
            for &y in &[0.25, 0.3, 0.35] {
                let x = y / beta;
                for p in 1..=2 {
                    let (s, c) = (moment_series(p, beta, x), moment_closed(p, beta, x));
                    assert!(
                        (s - c).abs() < 1e-13 * s.abs(),
                        "p = {p}, y = {y}: {s} vs {c}"
                    );
                }
            }
        }
    }
}
