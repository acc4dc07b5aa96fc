//! Zeros of `a` and of `f(·, 0)` on the positive imaginary axis.

use serde::{Deserialize, Serialize};

use super::jost::ScatteringPair;
use crate::error::{Error, Result};
use crate::numerics::{refine_root, roots::scan_values, Dip, DipCriterion};
use crate::string_core::{StringModel, TailModel};
use crate::trace::perturbation_norms;

/// Scan density on the logarithmic κ-grid.
const POINTS_PER_DECADE: f64 = 600.0;
const DIP: DipCriterion = DipCriterion {
    abs: 0.0,
    rel: 1e-9,
};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundStateSet {
    /// Zeros `κ_n` of `κ ↦ a(iκ)`, ascending.
    pub kappas: Vec<f64>,
    /// Eigenvalues of the scaled string, ascending.
    pub eigenvalues: Vec<f64>,
    /// `κ` values at which `f(iκ, 0)` vanishes (one per eigenvalue).
    pub eigen_kappas: Vec<f64>,
    pub kappa_max: f64,
    /// Local minima of `|a(iκ)|` or `|f(iκ, 0)|` close to zero without a sign change.
    pub dips: Vec<Dip>,
    /// Eigenvalue momenta coinciding with a zero of `a`.
    pub degenerate: Vec<f64>,
}

impl BoundStateSet {
    pub fn has_warnings(&self) -> bool {
        !self.dips.is_empty() || !self.degenerate.is_empty()
    }
}

fn log_grid(lo: f64, hi: f64) -> Vec<f64> {
    if !(hi > lo) {
        return Vec::new();
    }
    let n = ((hi / lo).log10() * POINTS_PER_DECADE).ceil().max(2.0) as usize;
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..=n)
        .map(|i| (llo + (lhi - llo) * i as f64 / n as f64).exp())
        .collect()
}

impl ScatteringPair {
    /// Smallest κ worth scanning, or `None` when no zero can exist.
    pub fn scan_floor(&self) -> Option<f64> {
        if self.is_free() {
            return None;
        }
        match self.tail() {
            TailModel::Linear => {
                let n0 = perturbation_norms(self.model()).ok()?.n0;
                // (4/3)κ⁻³ ≤ n0 for every zero.
                (n0 > 0.0).then(|| 0.5 * (4.0 / (3.0 * n0)).cbrt())
            }
            TailModel::Moebius { .. } => Some(1e-6 * self.sqrt_alpha()),
        }
    }

    /// Default search ceiling `10·max(1, rhs)^(1/3)·(1 + √α)`.
    pub fn default_kappa_max(&self) -> f64 {
        let norms = perturbation_norms(self.model()).unwrap_or_default();
        match self.tail() {
            TailModel::Linear => 10.0 * norms.n0.max(1.0).cbrt(),
            TailModel::Moebius { .. } => {
                let rhs = norms.a2.max(norms.a1.abs()).max(1.0);
                10.0 * rhs.cbrt() * (1.0 + self.sqrt_alpha())
            }
        }
    }

    fn scan<G: Fn(f64) -> f64>(
        &self,
        g: &G,
        lo: f64,
        hi: f64,
        tol: f64,
        skip_edge: bool,
    ) -> Result<(Vec<f64>, Vec<Dip>)> {
        let mut pieces = vec![(lo, hi)];
        let sa = self.sqrt_alpha();
        if skip_edge && sa > 0.0 {
            let (below, above) = (sa * (1.0 - 1e-9), sa * (1.0 + 1e-9));
            pieces = Vec::new();
            if lo < below {
                pieces.push((lo, below.min(hi)));
            }
            if hi > above {
                pieces.push((lo.max(above), hi));
            }
        }
        let mut roots = Vec::new();
        let mut dips = Vec::new();
        for (a, b) in pieces {
            let pts = log_grid(a, b);
            let values: Vec<f64> = pts.iter().map(|&x| g(x)).collect();
            let scan = scan_values(g, &pts, &values, DIP);
            for br in scan.brackets {
                roots.push(refine_root(g, br, tol)?.location);
            }
            dips.extend(scan.dips);
        }
        Ok((roots, dips))
    }

    /// Zeros of `a(iκ)` in `[lo, hi]`, excluding a neighbourhood of `√α`.
    pub fn a_zeros_between(&self, lo: f64, hi: f64, tol: f64) -> Result<(Vec<f64>, Vec<Dip>)> {
        self.scan(&|k| self.a_imaginary_reduced(k), lo, hi, tol, true)
    }

    /// Zeros of `f(iκ, 0)` in `[lo, hi]`.
    pub fn jost_zeros_between(&self, lo: f64, hi: f64, tol: f64) -> Result<(Vec<f64>, Vec<Dip>)> {
        self.scan(&|k| self.jost_imaginary_reduced(k), lo, hi, tol, false)
    }

    /// Eigenvalue of the scaled string belonging to `κ`.
    pub fn eigenvalue_of_kappa(&self, kappa: f64) -> f64 {
        let edge = self.tail().edge();
        (edge - kappa * kappa) / self.model().scaling.eta
    }

    /// Full bound-state search with adaptive ceiling: the ceiling is doubled
    /// until two consecutive doublings add no zero of `a` (at most eight).
    pub fn bound_states(&self, kappa_max: Option<f64>, tol: f64) -> Result<BoundStateSet> {
        check_args(kappa_max.unwrap_or(1.0), tol)?;
        let mut set = BoundStateSet::default();
        let Some(floor) = self.scan_floor() else {
            set.kappa_max = kappa_max.unwrap_or_else(|| self.default_kappa_max());
            return Ok(set);
        };
        let (mut hi, adaptive) = match kappa_max {
            Some(k) => (k, false),
            None => (self.default_kappa_max(), true),
        };
        let mut lo = floor;
        let mut quiet = 0;
        let mut doublings = 0;
        loop {
            if hi > lo {
                let (z, d) = self.a_zeros_between(lo, hi, tol)?;
                let (e, d2) = self.jost_zeros_between(lo, hi, tol)?;
                if z.is_empty() && lo > floor {
                    quiet += 1;
                } else {
                    quiet = 0;
                }
                set.kappas.extend(z);
                set.eigen_kappas.extend(e);
                set.dips.extend(d);
                set.dips.extend(d2);
            }
            if !adaptive || quiet >= 2 || doublings >= 8 {
                break;
            }
            lo = hi.max(floor);
            hi *= 2.0;
            doublings += 1;
        }
        set.kappa_max = hi;
        set.kappas.sort_by(f64::total_cmp);
        set.kappas
            .dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        set.eigen_kappas.sort_by(f64::total_cmp);
        set.eigen_kappas
            .dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        set.eigenvalues = set
            .eigen_kappas
            .iter()
            .map(|&k| self.eigenvalue_of_kappa(k))
            .collect();
        set.eigenvalues.sort_by(f64::total_cmp);
        set.degenerate = set
            .eigen_kappas
            .iter()
            .copied()
            .filter(|e| set.kappas.iter().any(|k| (k - e).abs() <= 1e-9 * e))
            .collect();
        Ok(set)
    }
}

fn check_args(kappa_max: f64, tol: f64) -> Result<()> {
    if !(kappa_max > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "kappa_max ({kappa_max}) and tol ({tol}) must be positive"
        )));
    }
    Ok(())
}

/// Zeros of `a` on the imaginary axis up to `kappa_max`, with dip warnings.
pub fn find_a_zeros(model: &StringModel, kappa_max: f64, tol: f64) -> Result<(Vec<f64>, Vec<Dip>)> {
    check_args(kappa_max, tol)?;
    let pair = ScatteringPair::new(&model.normalized())?;
    match pair.scan_floor() {
        Some(floor) => pair.a_zeros_between(floor, kappa_max, tol),
        None => Ok((Vec::new(), Vec::new())),
    }
}

/// Eigenvalues (poles of `m`) of the scaled string with `κ ≤ kappa_max`, ascending.
pub fn find_eigenvalues(model: &StringModel, kappa_max: f64, tol: f64) -> Result<Vec<f64>> {
    check_args(kappa_max, tol)?;
    let pair = ScatteringPair::new(model)?;
    let Some(floor) = pair.scan_floor() else {
        return Ok(Vec::new());
    };
    let (ks, _) = pair.jost_zeros_between(floor, kappa_max, tol)?;
    let mut ev: Vec<f64> = ks.iter().map(|&k| pair.eigenvalue_of_kappa(k)).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

pub fn bound_states(
    model: &StringModel,
    kappa_max: Option<f64>,
    tol: f64,
) -> Result<BoundStateSet> {
    ScatteringPair::new(model)?.bound_states(kappa_max, tol)
}
