//! Sum rules linking zeros of `a`, a weighted integral of `log|a|` and the
//! perturbation norms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::norms::perturbation_norms;
use crate::error::{Error, Result};
use crate::numerics::quadrature::integrate_with;
use crate::numerics::{QuadratureOptions, QuadratureResult, Upper};
use crate::scattering::ScatteringPair;
use crate::string_core::{StringModel, TailModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Identity {
    F0,
    Falpha1,
    Falpha2,
}

/// Weight of the `log|a|` integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weight {
    /// `k⁻⁴`, prefactor `2/π` over the real line.
    InverseQuartic,
    /// `(k² + α)⁻²`, prefactor `√α/π`.
    AlphaSquared,
    /// `k²(k² + α)⁻³`, prefactor `2/π`.
    AlphaCubed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureDiagnostics {
    pub panels: usize,
    #[serde(rename = "K")]
    pub k: f64,
    pub tail_bound: f64,
    pub error_estimate: f64,
}

impl From<&QuadratureResult> for QuadratureDiagnostics {
    fn from(r: &QuadratureResult) -> Self {
        Self {
            panels: r.panels,
            k: r.truncation_k,
            tail_bound: r.tail_bound,
            error_estimate: r.error_estimate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub identity: Identity,
    pub boundstate_term: f64,
    pub log_integral_term: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / max(1, |rhs|)`.
    pub residual: f64,
    pub kappa_max: f64,
    pub kappas: Vec<f64>,
    pub quadrature: QuadratureDiagnostics,
    /// Near-zeros of `a` without a sign change seen during the search.
    pub dips: usize,
    /// Second α-identity only: bound-state sum against `Σ F(κ/√α)/(4α^{3/2})`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recombination_residual: Option<f64>,
    /// `residual <= tol`; a failure suggests an incomplete zero search.
    pub converged: bool,
}

/// `F(s) = 2(s³ + s)/(s² - 1)² + log|(s - 1)/(s + 1)|`.
#[allow(non_snake_case)]
pub fn F_function(s: f64) -> Result<f64> {
    if !(s > 0.0) || s == 1.0 || !s.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "F is defined for s > 0, s ≠ 1; got {s}"
        )));
    }
    let d = s * s - 1.0;
    Ok(2.0 * (s * s * s + s) / (d * d) + ((s - 1.0) / (s + 1.0)).abs().ln())
}

fn quadrature_tol(tol: f64) -> f64 {
    (0.01 * tol).clamp(1e-13, 1e-9)
}

fn integrate_weighted(
    pair: &ScatteringPair,
    weight: Weight,
    abs_tol: f64,
) -> Result<QuadratureResult> {
    let alpha = pair.sqrt_alpha() * pair.sqrt_alpha();
    let (prefactor, w): (f64, Box<dyn Fn(f64) -> f64 + Sync>) = match weight {
        Weight::InverseQuartic => (4.0 / PI, Box::new(|k: f64| k.powi(-4))),
        Weight::AlphaSquared => (
            2.0 * alpha.sqrt() / PI,
            Box::new(move |k: f64| (k * k + alpha).powi(-2)),
        ),
        Weight::AlphaCubed => (
            4.0 / PI,
            Box::new(move |k: f64| k * k * (k * k + alpha).powi(-3)),
        ),
    };
    if weight != Weight::InverseQuartic && pair.tail() == TailModel::Linear {
        return Err(Error::InvalidArgument(
            "α-weights need a Möbius tail".into(),
        ));
    }
    if pair.is_free() {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
            truncation_k: 0.0,
            tail_bound: 0.0,
        });
    }
    let integrand = |k: f64| {
        if k <= 0.0 {
            return 0.0;
        }
        match pair.log_abs_a(k) {
            Ok(v) => prefactor * w(k) * v,
            Err(_) => f64::NAN,
        }
    };
    let opts = QuadratureOptions {
        abs_tol,
        ..Default::default()
    };
    integrate_with(&integrand, 0.0, Upper::Infinity, &opts)
}

/// Weighted `log|a|` integral over the real line including its prefactor.
pub fn log_a_integral(
    model: &StringModel,
    weight: Weight,
    abs_tol: f64,
) -> Result<QuadratureResult> {
    let pair = ScatteringPair::new(&model.normalized())?;
    integrate_weighted(&pair, weight, abs_tol)
}

fn residual(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / rhs.abs().max(1.0)
}

pub fn verify_trace_f0(model: &StringModel, tol: f64) -> Result<TraceReport> {
    if model.tail != TailModel::Linear {
        return Err(Error::InvalidArgument(
            "the F0 identity needs a linear tail".into(),
        ));
    }
    let model = model.normalized();
    let pair = ScatteringPair::new(&model)?;
    let rhs = perturbation_norms(&model)?.n0;
    let states = pair.bound_states(None, 1e-14)?;
    let boundstate_term = states
        .kappas
        .iter()
        .map(|k| 4.0 / (3.0 * k * k * k))
        .sum::<f64>();
    let q = integrate_weighted(&pair, Weight::InverseQuartic, quadrature_tol(tol))?;
    let lhs = boundstate_term + q.value;
    let residual = residual(lhs, rhs);
    Ok(TraceReport {
        identity: Identity::F0,
        boundstate_term,
        log_integral_term: q.value,
        lhs,
        rhs,
        residual,
        kappa_max: states.kappa_max,
        kappas: states.kappas,
        quadrature: (&q).into(),
        dips: states.dips.len(),
        recombination_residual: None,
        converged: residual <= tol,
    })
}

pub fn verify_trace_falpha(model: &StringModel, tol: f64) -> Result<(TraceReport, TraceReport)> {
    let TailModel::Moebius { alpha } = model.tail else {
        return Err(Error::InvalidArgument(
            "the α identities need a Möbius tail".into(),
        ));
    };
    let model = model.normalized();
    let pair = ScatteringPair::new(&model)?;
    let norms = perturbation_norms(&model)?;
    let states = pair.bound_states(None, 1e-14)?;
    let sa = alpha.sqrt();
    let mut first = 0.0;
    let mut second = 0.0;
    let mut logs = 0.0;
    let mut f_sum = 0.0;
    for &k in &states.kappas {
        let d = k * k - alpha;
        first += k / d / sa;
        second += (k * k * k + alpha * k) / (d * d) / (2.0 * alpha);
        logs += ((k - sa) / (k + sa)).abs().ln();
        f_sum += F_function(k / sa)?;
    }
    let bs1 = first + logs / (2.0 * alpha);
    let bs2 = second + logs / (4.0 * alpha * sa);
    let recombined = f_sum / (4.0 * alpha * sa);
    let recombination = (bs2 - recombined).abs() / bs2.abs().max(1.0);
    let qt = quadrature_tol(tol);
    let q1 = integrate_weighted(&pair, Weight::AlphaSquared, qt)?;
    let q2 = integrate_weighted(&pair, Weight::AlphaCubed, qt)?;
    let make = |identity, bs: f64, q: &QuadratureResult, rhs: f64, rec| {
        let lhs = bs + q.value;
        let residual = residual(lhs, rhs);
        TraceReport {
            identity,
            boundstate_term: bs,
            log_integral_term: q.value,
            lhs,
            rhs,
            residual,
            kappa_max: states.kappa_max,
            kappas: states.kappas.clone(),
            quadrature: q.into(),
            dips: states.dips.len(),
            recombination_residual: rec,
            converged: residual <= tol,
        }
    };
    Ok((
        make(Identity::Falpha1, bs1, &q1, norms.a1, None),
        make(Identity::Falpha2, bs2, &q2, norms.a2, Some(recombination)),
    ))
}
