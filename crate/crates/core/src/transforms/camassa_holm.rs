use num_complex::Complex64;
use serde::Serialize;

use crate::approximation::{GeneralCoefficients, GeneralMeasure, PiecewiseLinear, RealFunction};
use crate::error::{Error, Result};
use crate::numerics::quadrature::integrate_with;
use crate::numerics::{QuadratureOptions, Upper};
use crate::string_core::{ScalingParams, TailModel};

const QUAD_TOL: f64 = 1e-12;

/// Spectral data of the Camassa-Holm isospectral problem on the half line.
#[derive(Debug, Clone)]
pub struct CHData {
    pub u: RealFunction,
    /// `u′`, supplied rather than differentiated numerically.
    pub uprime: RealFunction,
    pub upsilon: GeneralMeasure,
    /// Samples and measure live on `[0, extent]`.
    pub extent: f64,
}

impl CHData {
    pub fn new(u: RealFunction, uprime: RealFunction, extent: f64) -> Self {
        Self {
            u,
            uprime,
            upsilon: GeneralMeasure::default(),
            extent,
        }
    }

    pub fn with_measure(mut self, upsilon: GeneralMeasure) -> Self {
        self.upsilon = upsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.extent > 0.0 && self.extent.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "extent must be positive, got {}",
                self.extent
            )));
        }
        self.upsilon.validate()?;
        if let Some(&(x, _)) = self.upsilon.atoms.iter().find(|a| a.0 > self.extent) {
            return Err(Error::InvalidArgument(format!(
                "atom at {x} beyond the extent"
            )));
        }
        Ok(())
    }

    fn kinks(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self
            .u
            .kinks()
            .iter()
            .chain(self.uprime.kinks())
            .chain(self.upsilon.density.iter().flat_map(|d| d.kinks()))
            .copied()
            .collect();
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }

    fn w_s(&self, t: f64) -> f64 {
        let s = t.ln_1p();
        self.u.eval(0.0) - (self.uprime.eval(s) + self.u.eval(s)) / (1.0 + t)
    }

    fn h1_density(&self, x: f64) -> f64 {
        (self.u.eval(x) - 1.0).powi(2) + self.uprime.eval(x).powi(2)
    }

    fn integrate<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: Upper) -> Result<f64> {
        let top = match hi {
            Upper::Finite(h) => h,
            Upper::Infinity => f64::INFINITY,
        };
        let breakpoints = self
            .kinks()
            .into_iter()
            .filter(|&x| x > lo && x < top)
            .collect();
        let opts = QuadratureOptions {
            abs_tol: QUAD_TOL,
            breakpoints,
            ..Default::default()
        };
        Ok(integrate_with(&f, lo, hi, &opts)?.value)
    }
}

/// Maps Camassa-Holm data to string coefficients through `t ↦ log(1 + t)`.
/// The result carries the Moebius tail with `α = 1/4` and the scaling
/// `c = u(0) − 1`, `η = 1`.
pub fn ch_to_string(data: &CHData, grid: &[f64]) -> Result<GeneralCoefficients> {
    data.validate()?;
    if grid.len() < 2 || grid[0] != 0.0 {
        return Err(Error::InvalidArgument(
            "grid must start at 0 and have at least two points".into(),
        ));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || !grid.iter().all(|t| t.is_finite()) {
        return Err(Error::InvalidArgument(
            "grid must be finite and strictly increasing".into(),
        ));
    }
    let t_max = *grid.last().unwrap();
    if t_max.ln_1p() > data.extent * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "grid end {t_max} maps beyond the data extent {}",
            data.extent
        )));
    }
    let u0 = data.u.eval(0.0);
    if !u0.is_finite() {
        return Err(Error::NonFinite("u(0)".into()));
    }
    let w = match (&data.u, &data.uprime) {
        (RealFunction::Closed(_), RealFunction::Closed(_)) => {
            let d = data.clone();
            RealFunction::closed(move |t| d.w_s(t))
        }
        _ => {
            let ys: Vec<f64> = grid.iter().map(|&t| data.w_s(t)).collect();
            let sampled = PiecewiseLinear::new(grid.to_vec(), ys)?;
            // Interpolation error, weighted as in the condition integral.
            let defect: f64 = grid
                .windows(2)
                .map(|c| {
                    let mid = 0.5 * (c[0] + c[1]);
                    (sampled.eval(mid) - data.w_s(mid)).powi(2) * (c[1] - c[0]) * (1.0 + mid)
                })
                .sum();
            if !(defect <= 1e-6) {
                return Err(Error::InvalidArgument(format!(
                    "grid too coarse to certify the condition integral (interpolation defect {defect:.3e})"
                )));
            }
            RealFunction::Sampled(sampled)
        }
    };
    let mut atoms = Vec::with_capacity(data.upsilon.atoms.len());
    for &(x, m) in &data.upsilon.atoms {
        let t = x.exp_m1();
        if t > t_max {
            return Err(Error::InvalidArgument(format!(
                "atom at {x} maps beyond the grid"
            )));
        }
        atoms.push((t, m * (-x).exp()));
    }
    let density =
        data.upsilon.density.clone().map(|d| {
            RealFunction::closed(move |t: f64| d.eval(t.ln_1p()) / ((1.0 + t) * (1.0 + t)))
        });
    let kinks = data
        .kinks()
        .into_iter()
        .map(f64::exp_m1)
        .filter(|&t| t > 0.0 && t < t_max)
        .collect();
    Ok(
        GeneralCoefficients::new(w, t_max, TailModel::Moebius { alpha: 0.25 })
            .with_measure(GeneralMeasure { density, atoms })
            .with_scaling(ScalingParams {
                c: u0 - 1.0,
                eta: 1.0,
            })
            .with_kinks(kinks),
    )
}

/// Weyl function of the Camassa-Holm problem from that of the string.
pub fn ch_weyl(m_s: Complex64, z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole("z = 0".into()));
    }
    Ok(m_s - 1.0 / (2.0 * z))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChCondition {
    /// `∫ (u − 1)² + u′²` over `[0, extent]`.
    pub h1_norm: f64,
    pub measure_total: f64,
    /// `∫ |u′ + u − 1|²`, which bounds the weighted string norm.
    pub string_norm: f64,
    pub satisfied: bool,
}

/// Checks `u − 1 ∈ H¹` and finiteness of `υ` on the data range.
pub fn ch_condition_check(data: &CHData) -> Result<ChCondition> {
    data.validate()?;
    let x = data.extent;
    let first = data.integrate(|t| data.h1_density(t), 0.0, Upper::Finite(0.5 * x))?;
    let second = data.integrate(|t| data.h1_density(t), 0.5 * x, Upper::Finite(x))?;
    let h1_norm = first + second;
    let string_norm = data.integrate(
        |t| (data.uprime.eval(t) + data.u.eval(t) - 1.0).powi(2),
        0.0,
        Upper::Finite(x),
    )?;
    if !h1_norm.is_finite() || !string_norm.is_finite() {
        return Err(Error::NonFinite("condition integrand".into()));
    }
    let mut measure_total: f64 = data.upsilon.atoms.iter().fold(0.0, |s, a| s + a.1);
    if let Some(d) = &data.upsilon.density {
        measure_total += data.integrate(|t| d.eval(t), 0.0, Upper::Finite(x))?;
    }
    let settled = second <= 1e-6_f64.max(0.05 * h1_norm);
    Ok(ChCondition {
        h1_norm,
        measure_total,
        string_norm,
        satisfied: settled && measure_total.is_finite(),
    })
}

/// `υ([lo, hi)) + ∫_lo^hi (u − 1)² + u′²`. An infinite `hi` integrates to
/// infinity for closed-form data and to the extent for sampled data.
pub fn energy_measure(data: &CHData, lo: f64, hi: f64) -> Result<f64> {
    data.validate()?;
    if !(lo < hi) || lo < 0.0 {
        return Err(Error::InvalidBracket { lo, hi });
    }
    let closed = !data.u.is_sampled()
        && !data.uprime.is_sampled()
        && data
            .upsilon
            .density
            .as_ref()
            .is_none_or(|d| !d.is_sampled());
    let upper = if hi.is_finite() {
        Upper::Finite(hi)
    } else if closed {
        Upper::Infinity
    } else {
        Upper::Finite(data.extent)
    };
    let mut total = data.integrate(|t| data.h1_density(t), lo, upper)?;
    if let Some(d) = &data.upsilon.density {
        total += data.integrate(|t| d.eval(t).max(0.0), lo, upper)?;
    }
    total += data
        .upsilon
        .atoms
        .iter()
        .filter(|a| a.0 >= lo && a.0 < hi)
        .map(|a| a.1)
        .sum::<f64>();
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityPair {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl IdentityPair {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
        }
    }
}

fn support_end(p: &PiecewiseLinear) -> Result<f64> {
    if *p.ys().last().unwrap() != 0.0 {
        return Err(Error::InvalidArgument(
            "test function must vanish at its last sample".into(),
        ));
    }
    Ok(*p.xs().last().unwrap())
}

/// Both sides of `∫ f′ h_S′ dt = ∫ g′h′ + ¼∫ gh − ½ g(0)h(0)` where
/// `f(t) = g(S(t))·√(1 + t)` and `h_S(t) = h(S(t))·√(1 + t)`.
pub fn substitution_identity(g: &PiecewiseLinear, h: &PiecewiseLinear) -> Result<IdentityPair> {
    let x_end = support_end(g)?.max(support_end(h)?);
    let mut kinks: Vec<f64> = g
        .xs()
        .iter()
        .chain(h.xs())
        .copied()
        .filter(|&x| x > 0.0 && x < x_end)
        .collect();
    kinks.sort_by(f64::total_cmp);
    kinks.dedup();

    let t_end = x_end.exp_m1();
    let t_kinks = kinks
        .iter()
        .map(|x| x.exp_m1())
        .filter(|&t| t > 0.0 && t < t_end)
        .collect();
    let lhs_f = |t: f64| {
        let s = t.ln_1p();
        let fp = (g.slope(s) + 0.5 * g.eval(s)) / (1.0 + t).sqrt();
        let hp = (h.slope(s) + 0.5 * h.eval(s)) / (1.0 + t).sqrt();
        fp * hp
    };
    let opts = QuadratureOptions {
        abs_tol: QUAD_TOL,
        breakpoints: t_kinks,
        ..Default::default()
    };
    let lhs = integrate_with(&lhs_f, 0.0, Upper::Finite(t_end), &opts)?.value;

    let rhs_f = |x: f64| g.slope(x) * h.slope(x) + 0.25 * g.eval(x) * h.eval(x);
    let opts = QuadratureOptions {
        abs_tol: QUAD_TOL,
        breakpoints: kinks,
        ..Default::default()
    };
    let rhs = integrate_with(&rhs_f, 0.0, Upper::Finite(x_end), &opts)?.value
        - 0.5 * g.eval(0.0) * h.eval(0.0);
    Ok(IdentityPair::new(lhs, rhs))
}

/// Both sides of `∫ f·h_S dυ_S = ∫ g·h dυ` for an atomic `υ`, with the
/// left side evaluated on the transported atoms.
pub fn measure_transport_identity(
    g: &PiecewiseLinear,
    h: &PiecewiseLinear,
    atoms: &[(f64, f64)],
) -> Result<IdentityPair> {
    let data = CHData::new(
        RealFunction::closed(|_| 1.0),
        RealFunction::closed(|_| 0.0),
        1.0,
    )
    .with_measure(GeneralMeasure::atoms(atoms.to_vec()));
    data.upsilon.validate()?;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for &(x, m) in atoms {
        let (t, ms) = (x.exp_m1(), m * (-x).exp());
        let s = t.ln_1p();
        lhs += g.eval(s) * h.eval(s) * (1.0 + t) * ms;
        rhs += g.eval(x) * h.eval(x) * m;
    }
    Ok(IdentityPair::new(lhs, rhs))
}
