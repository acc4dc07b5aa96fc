//! Adaptive Gauss-Kronrod (7/15) quadrature with a global error heap and a
//! power-law tail bound for semi-infinite ranges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
    /// Truncation point for semi-infinite ranges (equal to `hi` otherwise).
    pub truncation_k: f64,
    /// Bound on the discarded tail `∫_K^∞ |f|`; zero on finite ranges.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Upper {
    Finite(f64),
    Infinity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub max_panels: usize,
    /// First truncation point tried on semi-infinite ranges.
    pub initial_k: f64,
    /// Largest truncation point before giving up.
    pub max_k: f64,
    /// Interior points that must be panel boundaries (kinks, jumps).
    pub breakpoints: Vec<f64>,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_panels: 400_000,
            initial_k: 16.0,
            max_k: 1e9,
            breakpoints: Vec::new(),
        }
    }
}

/// One G7K15 panel: returns (Kronrod value, |Kronrod - Gauss|).
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Adaptive integration over `[points[0], points.last()]` starting from the
/// given panel boundaries. Panels with the largest error are bisected until the
/// summed error estimate drops below `abs_tol`.
pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: &F,
    points: &[f64],
    abs_tol: f64,
    max_panels: usize,
) -> Result<QuadratureResult> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two panel boundaries".into(),
        ));
    }
    if !(abs_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "abs_tol must be positive, got {abs_tol}"
        )));
    }
    let mut heap = BinaryHeap::new();
    let mut done = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            if b == a {
                continue;
            }
            return Err(Error::InvalidArgument(format!(
                "panel boundaries not increasing: {a} > {b}"
            )));
        }
        let (value, error) = gauss_kronrod(f, a, b);
        if !value.is_finite() {
            return Err(Error::NonFinite(format!(
                "integrand not finite on [{a}, {b}]"
            )));
        }
        heap.push(Panel { a, b, value, error });
    }
    let mut total_error: f64 = heap.iter().map(|p| p.error).sum();
    let mut count = heap.len();
    while total_error > abs_tol {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        // Panels that can no longer be split are frozen with their estimate.
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 1e-14 * worst.a.abs().max(1e-290)
        {
            total_error -= worst.error;
            done.push(worst);
            continue;
        }
        if count + 1 > max_panels {
            return Err(Error::NonConvergence(format!(
                "panel budget {max_panels} exhausted with error estimate {total_error:.3e} > {abs_tol:.3e}"
            )));
        }
        let (lv, le) = gauss_kronrod(f, worst.a, mid);
        let (rv, re) = gauss_kronrod(f, mid, worst.b);
        if !(lv.is_finite() && rv.is_finite()) {
            return Err(Error::NonFinite(format!(
                "integrand not finite on [{}, {}]",
                worst.a, worst.b
            )));
        }
        total_error += le + re - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
        count += 1;
        // Guard against drift in the running error total.
        if count % 4096 == 0 {
            total_error = heap.iter().map(|p| p.error).sum();
        }
    }
    let mut all: Vec<Panel> = heap.into_vec();
    all.extend(done);
    all.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = all.iter().map(|p| p.value).sum();
    let error_estimate = all.iter().map(|p| p.error).sum();
    Ok(QuadratureResult {
        value,
        error_estimate,
        panels: all.len(),
        truncation_k: *points.last().unwrap(),
        tail_bound: 0.0,
    })
}

/// Power-law envelope `|f(k)| ≤ exp(c0) k^c1` fitted on `[lo, hi]`.
fn fit_envelope<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Option<(f64, f64)> {
    const SAMPLES: usize = 240;
    const BINS: usize = 12;
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut samples = Vec::with_capacity(SAMPLES);
    for i in 0..SAMPLES {
        let t = llo + (lhi - llo) * (i as f64 + 0.5) / SAMPLES as f64;
        let v = f(t.exp()).abs();
        if v > 0.0 && v.is_finite() {
            samples.push((t, v.ln()));
        }
    }
    if samples.is_empty() {
        return None;
    }
    let per_bin = SAMPLES / BINS;
    let mut maxima = Vec::new();
    for b in 0..BINS {
        let lo_t = llo + (lhi - llo) * (b * per_bin) as f64 / SAMPLES as f64;
        let hi_t = llo + (lhi - llo) * ((b + 1) * per_bin) as f64 / SAMPLES as f64;
        if let Some(best) = samples
            .iter()
            .filter(|(t, _)| *t >= lo_t && *t < hi_t)
            .max_by(|p, q| p.1.total_cmp(&q.1))
        {
            maxima.push(*best);
        }
    }
    if maxima.len() < 2 {
        return Some((f64::INFINITY, 0.0));
    }
    let n = maxima.len() as f64;
    let mean_t = maxima.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_v = maxima.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = maxima.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let sxy: f64 = maxima.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_v)).sum();
    let c1 = sxy / sxx;
    let c0 = samples
        .iter()
        .map(|(t, v)| v - c1 * t)
        .fold(f64::NEG_INFINITY, f64::max);
    Some((c0, c1))
}

/// Default panel layout: geometric refinement towards `lo` plus any breakpoints.
fn initial_points(lo: f64, hi: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    let width = hi - lo;
    let mut h = width;
    for _ in 0..8 {
        h *= 0.25;
        pts.push(lo + h);
    }
    let n_uniform = 8;
    for i in 1..n_uniform {
        pts.push(lo + width * i as f64 / n_uniform as f64);
    }
    pts.extend(breakpoints.iter().copied().filter(|&x| x > lo && x < hi));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Integrates `f` over `[lo, hi]` or `[lo, ∞)` to absolute tolerance `abs_tol`.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: Upper,
    abs_tol: f64,
) -> Result<QuadratureResult> {
    let opts = QuadratureOptions {
        abs_tol,
        ..Default::default()
    };
    integrate_with(&f, lo, hi, &opts)
}

pub fn integrate_with<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: Upper,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    if !lo.is_finite() {
        return Err(Error::InvalidArgument("lower limit must be finite".into()));
    }
    match hi {
        Upper::Finite(hi) => {
            if !hi.is_finite() || hi < lo {
                return Err(Error::InvalidArgument(format!("invalid upper limit {hi}")));
            }
            if hi == lo {
                return Ok(QuadratureResult {
                    value: 0.0,
                    error_estimate: 0.0,
                    panels: 0,
                    truncation_k: hi,
                    tail_bound: 0.0,
                });
            }
            integrate_panels(
                f,
                &initial_points(lo, hi, &opts.breakpoints),
                opts.abs_tol,
                opts.max_panels,
            )
        }
        Upper::Infinity => {
            let mut k = opts.initial_k.max(10.0 * lo.abs()).max(lo + 1.0);
            let tail = loop {
                if k > opts.max_k {
                    return Err(Error::NonConvergence(format!(
                        "no integrable tail envelope found below K = {:.3e}",
                        opts.max_k
                    )));
                }
                let env_lo = (k / 10.0).max(lo + (k - lo) * 0.1);
                match fit_envelope(f, env_lo, k) {
                    None => break 0.0,
                    Some((c0, c1)) if c1 < -1.0 && c0.is_finite() => {
                        let bound = (c0 + (c1 + 1.0) * k.ln()).exp() / (-c1 - 1.0);
                        if bound <= 0.5 * opts.abs_tol {
                            break bound;
                        }
                    }
                    Some(_) => {}
                }
                k *= 2.0;
            };
            let mut res = integrate_panels(
                f,
                &semi_infinite_points(lo, k, &opts.breakpoints),
                0.5 * opts.abs_tol,
                opts.max_panels,
            )?;
            res.truncation_k = k;
            res.tail_bound = tail;
            Ok(res)
        }
    }
}

fn semi_infinite_points(lo: f64, k: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut pts = vec![lo];
    let mut x = if lo > 0.0 { lo } else { 1e-3_f64.min(k / 1e3) };
    if lo <= 0.0 {
        pts.push(lo + x);
    }
    while x < k {
        x = (x * 2.0).min(k);
        // Switch to unit-width panels once they are coarser than one unit.
        if x > 1.0 {
            break;
        }
        pts.push(lo.max(0.0) + x);
    }
    let start = *pts.last().unwrap();
    let mut y = start;
    let step = ((k - start) / 4096.0).max(1.0);
    while y + step < k {
        y += step;
        pts.push(y);
    }
    pts.push(k);
    pts.extend(breakpoints.iter().copied().filter(|&b| b > lo && b < k));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `∫_ℝ f` for an even integrand, evaluated as twice the half-line integral.
pub fn integrate_even_real_line<F: Fn(f64) -> f64>(f: F, abs_tol: f64) -> Result<QuadratureResult> {
    let mut res = adaptive_integrate(f, 0.0, Upper::Infinity, 0.5 * abs_tol)?;
    res.value *= 2.0;
    res.error_estimate *= 2.0;
    res.tail_bound *= 2.0;
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let r = adaptive_integrate(|x| x * x, 0.0, Upper::Finite(1.0), 1e-14).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn exponential_tail() {
        let r = adaptive_integrate(|x: f64| (-x).exp(), 0.0, Upper::Infinity, 1e-11).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "{r:?}");
        assert!(r.tail_bound <= 0.5e-11);
    }

    #[test]
    fn log_sextic_oracle() {
        let f = |k: f64| {
            if k == 0.0 {
                0.0
            } else {
                (k.powi(6)).ln_1p() / k.powi(4)
            }
        };
        let r = adaptive_integrate(f, 0.0, Upper::Infinity, 1e-10).unwrap();
        assert!(
            (r.value - PI / 3.0).abs() < 1e-8,
            "{} vs {}",
            r.value,
            PI / 3.0
        );
    }

    #[test]
    fn log_singularity_at_origin() {
        let r = adaptive_integrate(|x: f64| x.ln(), 0.0, Upper::Finite(1.0), 1e-11).unwrap();
        assert!((r.value + 1.0).abs() < 1e-9);
    }

    #[test]
    fn even_line_integral_is_twice_half_line() {
        let g = |x: f64| (-x * x).exp();
        let full = integrate_even_real_line(g, 1e-12).unwrap();
        let half = adaptive_integrate(g, 0.0, Upper::Infinity, 0.5e-12).unwrap();
        assert_eq!(full.value, 2.0 * half.value);
        assert!((full.value - PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn breakpoints_capture_jumps() {
        let opts = QuadratureOptions {
            abs_tol: 1e-13,
            breakpoints: vec![0.3],
            ..Default::default()
        };
        let r = integrate_with(
            &|x: f64| if x < 0.3 { 1.0 } else { 2.0 },
            0.0,
            Upper::Finite(1.0),
            &opts,
        )
        .unwrap();
        assert!((r.value - (0.3 + 1.4)).abs() < 1e-14);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let f = |x: f64| (1.0 / x).sin() / x;
        let e = integrate_panels(&f, &[1e-9, 1.0], 1e-14, 50).unwrap_err();
        assert!(matches!(e, Error::NonConvergence(_)));
    }
}
