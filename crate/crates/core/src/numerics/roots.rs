//! Sign-change scanning and Brent refinement for real functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub location: f64,
    pub bracket: (f64, f64),
    pub residual: f64,
    pub refinement_iterations: usize,
}

/// A local minimum of `|g|` without a sign change that came close to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dip {
    pub location: f64,
    pub value: f64,
    /// Largest `|g|` at the two neighbouring scan points.
    pub scale: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScanResult {
    pub brackets: Vec<(f64, f64)>,
    pub dips: Vec<Dip>,
}

/// A dip is reported when the refined minimum satisfies
/// `|g| <= abs + rel * scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipCriterion {
    pub abs: f64,
    pub rel: f64,
}

/// Scans `g` on a uniform grid of `grid` points over `[lo, hi]`.
pub fn bracket_roots<G: Fn(f64) -> f64>(
    g: G,
    lo: f64,
    hi: f64,
    grid: usize,
    dip_tol: f64,
) -> ScanResult {
    let grid = grid.max(2);
    let points: Vec<f64> = (0..grid)
        .map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64)
        .collect();
    scan_points(
        &g,
        &points,
        DipCriterion {
            abs: dip_tol,
            rel: 0.0,
        },
    )
}

/// Scans `g` at the given increasing points. Every sign change between
/// consecutive non-zero samples yields a bracket; interior local minima of
/// `|g|` without a sign change are refined by golden-section search and
/// reported as dips when they meet `dip`.
pub fn scan_points<G: Fn(f64) -> f64>(g: &G, points: &[f64], dip: DipCriterion) -> ScanResult {
    let values: Vec<f64> = points.iter().map(|&x| g(x)).collect();
    scan_values(g, points, &values, dip)
}

pub(crate) fn scan_values<G: Fn(f64) -> f64>(
    g: &G,
    points: &[f64],
    values: &[f64],
    dip: DipCriterion,
) -> ScanResult {
    let mut out = ScanResult::default();
    let mut last: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v == 0.0 || !v.is_finite() {
            continue;
        }
        if let Some(j) = last {
            if (values[j] < 0.0) != (v < 0.0) {
                out.brackets.push((points[j], points[i]));
            }
        }
        last = Some(i);
    }
    for i in 1..values.len().saturating_sub(1) {
        let (a, b, c) = (values[i - 1].abs(), values[i].abs(), values[i + 1].abs());
        let same_sign = values[i - 1] * values[i] > 0.0 && values[i] * values[i + 1] > 0.0;
        let touching = values[i] == 0.0 && values[i - 1] * values[i + 1] > 0.0;
        if !(touching || (same_sign && b <= a && b <= c && b < a.max(c))) {
            continue;
        }
        let scale = a.max(c);
        let (loc, val) = if touching {
            (points[i], 0.0)
        } else {
            // Minimizing the signed value exposes a pair of close zeros
            // hiding between two grid points.
            let s = values[i].signum();
            let (x, v) = golden_min(|x| s * g(x), points[i - 1], points[i + 1]);
            if v < 0.0 {
                out.brackets.push((points[i - 1], x));
                out.brackets.push((x, points[i + 1]));
                continue;
            }
            (x, v)
        };
        if val <= dip.abs + dip.rel * scale {
            out.dips.push(Dip {
                location: loc,
                value: val,
                scale,
            });
        }
    }
    out.brackets.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Brent's method (inverse quadratic interpolation, secant and bisection) on
/// a sign-changing bracket. Terminates once the bracket is narrower than
/// `tol` (relative to the magnitude of the root when it exceeds one).
pub fn refine_root<G: Fn(f64) -> f64>(g: G, bracket: (f64, f64), tol: f64) -> Result<RootRecord> {
    let (mut a, mut b) = bracket;
    let (mut fa, mut fb) = (g(a), g(b));
    let record = |x: f64, fx: f64, it| RootRecord {
        location: x,
        bracket,
        residual: fx.abs(),
        refinement_iterations: it,
    };
    if fa == 0.0 {
        return Ok(record(a, 0.0, 0));
    }
    if fb == 0.0 {
        return Ok(record(b, 0.0, 0));
    }
    if !(fa.is_finite() && fb.is_finite()) || (fa < 0.0) == (fb < 0.0) {
        return Err(Error::InvalidBracket { lo: a, hi: b });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for it in 1..=300 {
        if (fb < 0.0) == (fc < 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let xtol = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol * b.abs().max(1.0);
        let m = 0.5 * (c - b);
        if m.abs() <= xtol || fb == 0.0 {
            return Ok(record(b, fb, it));
        }
        if e.abs() >= xtol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (xtol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > xtol { d } else { xtol.copysign(m) };
        fb = g(b);
        if !fb.is_finite() {
            return Err(Error::NonFinite(format!("root function not finite at {b}")));
        }
    }
    Ok(record(b, fb, 300))
}
