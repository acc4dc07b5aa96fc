//! Reduction of general coefficients to the exactly solvable class.
//!
//! A general pair `(W, υ)` is normalized with `(c, η)`, then replaced by a
//! piecewise constant `W_n` on `[0, R_n]` (cell averages) and a discrete
//! `υ_n` (equal-mass groups placed at their centroids).

mod coefficients;

pub use coefficients::{GeneralCoefficients, GeneralMeasure, PiecewiseLinear, RealFunction};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::gauss_kronrod;
use crate::scattering::weyl_m;
use crate::string_core::{DiscreteMeasure, ScalingParams, StepFunction, StringModel};
use crate::trace::{jensen_mu_lower, perturbation_norms, spectral_mass};

const QUAD_TOL: f64 = 1e-12;
const MAX_CELLS: usize = 1 << 20;
const R_CANDIDATES: usize = 256;

/// Finite-range values of the condition integrals of a normalized pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionIntegrals {
    pub scaling: ScalingParams,
    /// `∫|W̃ − tail|²·weight` over `[0, extent]`, weight `1` or `1 + 2√α x`.
    pub w_norm: f64,
    /// Total mass of `υ̃`.
    pub measure_total: f64,
    /// `∫ x dυ̃`.
    pub measure_moment: f64,
    /// The perturbation norm: `n0` for the linear tail, `a2` for the Moebius tail.
    pub norm: f64,
}

/// Result of one reduction step.
#[derive(Debug, Clone, Serialize)]
pub struct Approximation {
    pub model: StringModel,
    pub n: usize,
    pub r_n: f64,
    pub cells: usize,
    pub tail_error: f64,
    pub cell_error: f64,
    pub condition: ConditionIntegrals,
}

/// Least squares fit of `W ≈ c + η·tail` on the upper half of the extent.
pub fn fit_scaling(general: &GeneralCoefficients) -> Result<ScalingParams> {
    general.validate()?;
    let x_hi = general.extent;
    if x_hi <= 0.0 {
        return Err(Error::TailFit("zero extent leaves nothing to fit".into()));
    }
    let xs: Vec<f64> = match &general.w {
        RealFunction::Sampled(p) => p
            .xs()
            .iter()
            .copied()
            .filter(|&x| x > 0.5 * x_hi && x <= x_hi)
            .collect(),
        RealFunction::Closed(_) => (1..=200)
            .map(|j| x_hi * (0.5 + 0.5 * j as f64 / 200.0))
            .collect(),
    };
    if xs.len() < 2 {
        return Err(Error::TailFit(
            "fewer than two samples in the fitting window".into(),
        ));
    }
    let g: Vec<f64> = xs.iter().map(|&x| general.tail.eval(x)).collect();
    let y: Vec<f64> = xs.iter().map(|&x| general.w.eval(x)).collect();
    let n = xs.len() as f64;
    let gm = g.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sgg: f64 = g.iter().map(|v| (v - gm).powi(2)).sum();
    let sgy: f64 = g.iter().zip(&y).map(|(a, b)| (a - gm) * (b - ym)).sum();
    if !(sgg > 1e-300) {
        return Err(Error::TailFit(
            "tail shape is flat on the fitting window".into(),
        ));
    }
    let eta = sgy / sgg;
    let c = ym - eta * gm;
    if !(eta > 0.0) || !c.is_finite() {
        return Err(Error::TailFit(format!(
            "fitted slope {eta} is not positive"
        )));
    }
    let rms = (g
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - c - eta * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let spread = (y.iter().map(|v| (v - ym).powi(2)).sum::<f64>() / n).sqrt();
    if rms > 1e-2 * spread.max(1e-300) && rms > 1e-12 * (1.0 + c.abs()) {
        return Err(Error::TailFit(format!(
            "residual {rms:.3e} against spread {spread:.3e}"
        )));
    }
    Ok(ScalingParams { c, eta })
}

/// The declared scaling, or a fitted one.
pub fn effective_scaling(general: &GeneralCoefficients) -> Result<ScalingParams> {
    match general.scaling {
        Some(s) => Ok(s),
        None => fit_scaling(general),
    }
}

struct Normalized<'a> {
    general: &'a GeneralCoefficients,
    scaling: ScalingParams,
    beta: f64,
}

impl Normalized<'_> {
    fn w(&self, x: f64) -> f64 {
        (self.general.w.eval(x) - self.scaling.c) / self.scaling.eta
    }

    fn diff(&self, x: f64) -> f64 {
        self.w(x) - self.general.tail.eval(x)
    }

    fn weight(&self, x: f64) -> f64 {
        1.0 + self.beta * x
    }

    fn mass_scale(&self) -> f64 {
        1.0 / (self.scaling.eta * self.scaling.eta)
    }

    fn density(&self, x: f64) -> f64 {
        self.general
            .upsilon
            .density
            .as_ref()
            .map_or(0.0, |d| d.eval(x).max(0.0))
            * self.mass_scale()
    }

    fn has_density(&self) -> bool {
        self.general.upsilon.density.is_some()
    }

    fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let s = self.mass_scale();
        self.general
            .upsilon
            .atoms
            .iter()
            .map(move |&(x, m)| (x, m * s))
    }

    fn integrate<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64) -> Result<f64> {
        self.general.integrate(f, lo, hi, QUAD_TOL)
    }

    fn density_mass(&self, lo: f64, hi: f64) -> Result<f64> {
        if !self.has_density() {
            return Ok(0.0);
        }
        self.integrate(|x| self.density(x), lo, hi)
    }
}

fn normalize(general: &GeneralCoefficients) -> Result<Normalized<'_>> {
    general.validate()?;
    let scaling = effective_scaling(general)?;
    let beta = general.tail.alpha().map_or(0.0, |a| 2.0 * a.sqrt());
    Ok(Normalized {
        general,
        scaling,
        beta,
    })
}

/// Condition integrals on `[0, extent]`. Reports [`Error::Divergent`] when the
/// upper half of the range still carries a non-negligible share.
pub fn condition_integrals(general: &GeneralCoefficients) -> Result<ConditionIntegrals> {
    let nz = normalize(general)?;
    let x = general.extent;
    let f = |t: f64| nz.diff(t).powi(2) * nz.weight(t);
    let first = nz.integrate(f, 0.0, 0.5 * x)?;
    let second = nz.integrate(f, 0.5 * x, x)?;
    let w_norm = first + second;
    if !w_norm.is_finite() {
        return Err(Error::NonFinite("condition integral".into()));
    }
    if second > 1e-6_f64.max(0.05 * w_norm) {
        return Err(Error::Divergent {
            partial: w_norm,
            extent: x,
        });
    }
    for &(p, _) in &general.upsilon.atoms {
        if p > x {
            return Err(Error::InvalidArgument(format!(
                "atom at {p} beyond the extent {x}"
            )));
        }
    }
    let mut total = nz.density_mass(0.0, x)?;
    let mut moment = if nz.has_density() {
        nz.integrate(|t| t * nz.density(t), 0.0, x)?
    } else {
        0.0
    };
    for (p, m) in nz.atoms() {
        total += m;
        moment += p * m;
    }
    Ok(ConditionIntegrals {
        scaling: nz.scaling,
        w_norm,
        measure_total: total,
        measure_moment: moment,
        norm: w_norm + total + nz.beta * moment,
    })
}

/// Cell boundaries: a uniform grid of `m` cells merged with the kinks.
fn cell_grid(general: &GeneralCoefficients, r: f64, m: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..=m).map(|j| r * j as f64 / m as f64).collect();
    pts.extend(general.breakpoints(0.0, r));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * r.max(1.0));
    *pts.last_mut().unwrap() = r;
    pts
}

fn cell_averages(nz: &Normalized<'_>, grid: &[f64]) -> (Vec<f64>, f64) {
    let cells: Vec<(f64, f64)> = grid
        .par_windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let avg = gauss_kronrod(&|x| nz.w(x), a, b).0 / (b - a);
            let err = gauss_kronrod(&|x| (nz.w(x) - avg).powi(2), a, b).0;
            (avg, err)
        })
        .collect();
    let err = cells.iter().map(|c| c.1).sum();
    (cells.into_iter().map(|c| c.0).collect(), err)
}

/// Equal-mass grouping of the density on `[0, r]` into `n` atoms at group centroids.
fn density_atoms(nz: &Normalized<'_>, r: f64, n: usize) -> Vec<(f64, f64)> {
    if !nz.has_density() || r <= 0.0 {
        return Vec::new();
    }
    let fine = (16 * n * (r.ceil() as usize).max(1)).clamp(64, MAX_CELLS);
    let h = r / fine as f64;
    let pieces: Vec<(f64, f64)> = (0..fine)
        .into_par_iter()
        .map(|j| {
            let (a, b) = (
                j as f64 * h,
                if j + 1 == fine { r } else { (j + 1) as f64 * h },
            );
            let m = gauss_kronrod(&|x| nz.density(x), a, b).0;
            let mx = gauss_kronrod(&|x| x * nz.density(x), a, b).0;
            (m, mx)
        })
        .collect();
    let total: f64 = pieces.iter().map(|p| p.0).sum();
    if total <= 0.0 {
        return Vec::new();
    }
    let target = total / n as f64;
    let mut out = Vec::with_capacity(n);
    let (mut cum, mut gm, mut gx) = (0.0, 0.0, 0.0);
    for (j, &(m, mx)) in pieces.iter().enumerate() {
        cum += m;
        gm += m;
        gx += mx;
        let boundary = target * (out.len() + 1) as f64 * (1.0 - 1e-9);
        if (out.len() + 1 < n && cum >= boundary) || j + 1 == fine {
            if gm > 0.0 {
                out.push(((gx / gm).clamp(0.0, r), gm));
            }
            gm = 0.0;
            gx = 0.0;
        }
    }
    out
}

/// Reduces `general` to a model of the exactly solvable class with accuracy `1/n`.
pub fn approximate(general: &GeneralCoefficients, n: usize) -> Result<StringModel> {
    Ok(approximate_detailed(general, n)?.model)
}

pub fn approximate_detailed(general: &GeneralCoefficients, n: usize) -> Result<Approximation> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let condition = condition_integrals(general)?;
    let nz = normalize(general)?;
    let x = general.extent;
    let inv_n = 1.0 / n as f64;

    // Candidate cut points and the tail error beyond each of them.
    let mut cands: Vec<f64> = (0..=R_CANDIDATES)
        .map(|j| x * j as f64 / R_CANDIDATES as f64)
        .collect();
    cands.extend(general.breakpoints(0.0, x));
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let pieces: Vec<f64> = cands
        .par_windows(2)
        .map(|w| nz.integrate(|t| nz.diff(t).powi(2) * nz.weight(t), w[0], w[1]))
        .collect::<Result<_>>()?;
    let dens: Vec<f64> = cands
        .par_windows(2)
        .map(|w| nz.density_mass(w[0], w[1]))
        .collect::<Result<_>>()?;
    let atom_max = nz.atoms().map(|a| a.0).fold(0.0, f64::max);
    let dens_total: f64 = dens.iter().sum();
    let mut tail = vec![0.0; cands.len()];
    let mut dtail = vec![0.0; cands.len()];
    for j in (0..pieces.len()).rev() {
        tail[j] = tail[j + 1] + pieces[j];
        dtail[j] = dtail[j + 1] + dens[j];
    }
    // The measure is not truncated: R_n also covers the atoms and the density support.
    let idx = (0..cands.len())
        .find(|&j| {
            tail[j] < inv_n && cands[j] >= atom_max && dtail[j] <= 1e-14 * (1.0 + dens_total)
        })
        .unwrap_or(cands.len() - 1);
    let r_n = cands[idx];
    let tail_error = tail[idx];

    let target = if nz.beta > 0.0 {
        inv_n / r_n.max(1.0)
    } else {
        inv_n
    };
    let (mut breakpoints, mut values, mut cell_error) = (vec![0.0], Vec::new(), 0.0);
    if r_n > 0.0 {
        let mut m = n;
        loop {
            let grid = cell_grid(general, r_n, m);
            let (vals, err) = cell_averages(&nz, &grid);
            if err < target {
                breakpoints = grid;
                values = vals;
                cell_error = err;
                break;
            }
            if grid.len() > MAX_CELLS {
                return Err(Error::NonConvergence(format!(
                    "cell error {err:.3e} above {target:.3e} with {} cells",
                    grid.len() - 1
                )));
            }
            m *= 2;
        }
    }

    let mut atoms: Vec<(f64, f64)> = nz.atoms().collect();
    atoms.extend(density_atoms(&nz, r_n, n));
    let lumped = dtail[idx];
    if lumped > 0.0 {
        atoms.push((r_n, lumped));
    }
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for (p, m) in atoms {
        match merged.last_mut() {
            Some(last) if last.0 == p => last.1 += m,
            _ if m > 0.0 => merged.push((p, m)),
            _ => {}
        }
    }
    // Compensate the rounding of the grouping so that the total mass is preserved.
    if nz.has_density() {
        let others = merged_total(&merged) - merged.last().map_or(0.0, |a| a.1);
        if let Some(last) = merged.last_mut() {
            let rest = condition.measure_total - others;
            if rest > 0.0 {
                last.1 = rest;
            }
        }
    }
    let upsilon = DiscreteMeasure::new(
        merged.iter().map(|a| a.0).collect(),
        merged.iter().map(|a| a.1).collect(),
    );
    let model = StringModel::new(
        general.tail,
        StepFunction::new(breakpoints, values),
        upsilon,
    )
    .with_scaling(nz.scaling);
    model.validate()?;
    Ok(Approximation {
        cells: model.step.values.len(),
        model,
        n,
        r_n,
        tail_error,
        cell_error,
        condition,
    })
}

fn merged_total(atoms: &[(f64, f64)]) -> f64 {
    atoms.iter().map(|a| a.1).sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceEntry {
    pub n: usize,
    pub r_n: f64,
    pub cells: usize,
    pub norm: f64,
    pub mu_omega: f64,
    pub jensen_lower: f64,
    pub weyl: Vec<Complex64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub omega: (f64, f64),
    pub general_norm: f64,
    pub entries: Vec<ConvergenceEntry>,
    /// `sup_z |m_{n_{j+1}}(z) − m_{n_j}(z)|`.
    pub sup_differences: Vec<f64>,
    pub norm_errors: Vec<f64>,
    pub differences_decreasing: bool,
    pub jensen_consistent: bool,
}

/// Cauchy-type diagnostics along a sequence of approximations. `omega` is
/// given in the normalized spectral variable and defaults to `[edge + 1, edge + 2]`.
pub fn convergence_report(
    general: &GeneralCoefficients,
    n_list: &[usize],
    zgrid: &[Complex64],
    omega: Option<(f64, f64)>,
) -> Result<ConvergenceReport> {
    if zgrid.iter().any(|z| z.im == 0.0) {
        return Err(Error::InvalidArgument(
            "zgrid must avoid the real axis".into(),
        ));
    }
    let edge = general.tail.edge();
    let omega = omega.unwrap_or((edge + 1.0, edge + 2.0));
    let general_norm = condition_integrals(general)?.norm;
    let entries: Vec<ConvergenceEntry> = n_list
        .par_iter()
        .map(|&n| {
            let a = approximate_detailed(general, n)?;
            let norms = perturbation_norms(&a.model)?;
            let norm = if general.tail.alpha().is_some() {
                norms.a2
            } else {
                norms.n0
            };
            let weyl = zgrid
                .iter()
                .map(|&z| weyl_m(&a.model, z))
                .collect::<Result<_>>()?;
            Ok(ConvergenceEntry {
                n,
                r_n: a.r_n,
                cells: a.cells,
                norm,
                mu_omega: spectral_mass(&a.model, omega.0, omega.1)?,
                jensen_lower: jensen_mu_lower(omega.0, omega.1, norm, general.tail)?,
                weyl,
            })
        })
        .collect::<Result<_>>()?;
    let sup_differences: Vec<f64> = entries
        .windows(2)
        .map(|w| {
            w[0].weyl
                .iter()
                .zip(&w[1].weyl)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    let differences_decreasing = sup_differences
        .windows(2)
        .all(|d| d[1] <= d[0] * (1.0 + 1e-9) + 1e-12);
    let jensen_consistent = entries.iter().all(|e| e.mu_omega >= e.jensen_lower);
    Ok(ConvergenceReport {
        omega,
        general_norm,
        norm_errors: entries
            .iter()
            .map(|e| (e.norm - general_norm).abs())
            .collect(),
        entries,
        sup_differences,
        differences_decreasing,
        jensen_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::string_core::TailModel;
    use approx::assert_abs_diff_eq;

    fn linear_w(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        extent: f64,
    ) -> GeneralCoefficients {
        GeneralCoefficients::new(RealFunction::closed(f), extent, TailModel::Linear)
    }

    #[test]
    fn affine_fit() {
        let s = fit_scaling(&linear_w(|x| 3.0 + 2.0 * x, 10.0)).unwrap();
        assert_abs_diff_eq!(s.c, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.eta, 2.0, epsilon = 1e-12);
        let s = fit_scaling(&linear_w(|x| x, 10.0)).unwrap();
        assert_abs_diff_eq!(s.c, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.eta, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn moebius_fit() {
        let g = GeneralCoefficients::new(
            RealFunction::closed(|x| 2.0 + x / (1.0 + x)),
            20.0,
            TailModel::Moebius { alpha: 0.25 },
        );
        let s = fit_scaling(&g).unwrap();
        assert_abs_diff_eq!(s.c, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.eta, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn inconsistent_tail_is_rejected() {
        assert!(matches!(
            fit_scaling(&linear_w(|x| x * x, 10.0)),
            Err(Error::TailFit(_))
        ));
    }

    #[test]
    fn unperturbed_reduces_to_zero_norm() {
        for n in [1, 10, 100] {
            let a = approximate_detailed(&linear_w(|x| x, 5.0), n).unwrap();
            assert_eq!(a.r_n, 0.0);
            assert_eq!(perturbation_norms(&a.model).unwrap().n0, 0.0);
        }
    }

    #[test]
    fn uniform_density_quantiles() {
        let g = linear_w(|x| x, 1.0).with_measure(GeneralMeasure {
            density: Some(RealFunction::closed(|x| if x <= 1.0 { 1.0 } else { 0.0 })),
            atoms: vec![],
        });
        for n in [1usize, 4, 10] {
            let m = approximate(&g, n).unwrap();
            assert_eq!(m.upsilon.positions.len(), n);
            for (j, (p, w)) in m.upsilon.atoms().enumerate() {
                assert_abs_diff_eq!(p, (j as f64 + 0.5) / n as f64, epsilon = 1e-9);
                assert_abs_diff_eq!(w, 1.0 / n as f64, epsilon = 1e-9);
            }
            assert_abs_diff_eq!(m.upsilon.total(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn declared_zero_offset_diverges() {
        let g = linear_w(|x| x + if x > 1.0 { 2.0 } else { 0.0 }, 3.0)
            .with_kinks(vec![1.0])
            .with_scaling(ScalingParams { c: 0.0, eta: 1.0 });
        assert!(matches!(approximate(&g, 10), Err(Error::Divergent { .. })));
        let fitted = linear_w(|x| x + if x > 1.0 { 2.0 } else { 0.0 }, 3.0).with_kinks(vec![1.0]);
        let a = approximate_detailed(&fitted, 10).unwrap();
        assert_abs_diff_eq!(a.condition.scaling.c, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.condition.w_norm, 4.0, epsilon = 1e-10);
        // W is piecewise linear between kinks, so cell averages land exactly on x - 2 on [0, 1).
        assert!(a.cell_error < 0.1);
    }

    #[test]
    fn norm_converges() {
        let g = linear_w(|x| x + (-x).exp(), 40.0);
        let exact = 0.5;
        for n in [4, 16, 64] {
            let m = approximate(&g, n).unwrap();
            let n0 = perturbation_norms(&m).unwrap().n0;
            assert!((n0 - exact).abs() <= 2.0 / n as f64, "n = {n}: {n0}");
        }
    }

    #[test]
    fn moebius_moment_inequality() {
        let g = GeneralCoefficients::new(
            RealFunction::closed(|x| x / (1.0 + x)),
            6.0,
            TailModel::Moebius { alpha: 0.25 },
        )
        .with_measure(GeneralMeasure {
            density: Some(RealFunction::closed(|x| if x < 2.0 { x } else { 0.0 })),
            atoms: vec![(0.5, 1.0)],
        })
        .with_kinks(vec![2.0]);
        let c = condition_integrals(&g).unwrap();
        for n in [3, 17] {
            let m = approximate(&g, n).unwrap();
            let moment: f64 = m.upsilon.atoms().map(|(p, w)| p * w).sum();
            assert!(moment <= c.measure_moment + 1e-12);
            assert_abs_diff_eq!(m.upsilon.total(), c.measure_total, epsilon = 1e-13);
        }
    }

    #[test]
    fn convergence_diagnostics() {
        let g = linear_w(|x| x + (-x).exp(), 30.0);
        let z = [Complex64::new(-1.0, 1.0), Complex64::new(2.0, 0.5)];
        let r = convergence_report(&g, &[4, 16, 64], &z, None).unwrap();
        assert!(r.differences_decreasing, "{:?}", r.sup_differences);
        assert!(r.jensen_consistent);
    }
}
