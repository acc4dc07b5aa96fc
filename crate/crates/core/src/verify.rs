//! Randomized model ensembles and the invariant suites run by `verify`.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::approximation::{approximate, GeneralCoefficients, PiecewiseLinear, RealFunction};
use crate::error::Result;
use crate::numerics::{adaptive_integrate, Upper};
use crate::scattering::{find_a_zeros, find_eigenvalues, weyl_m, ScatteringPair};
use crate::string_core::{
    closed_form_jets, det, fundamental_jet, fundamental_system, interval_transfer, mass_jump,
    DiscreteMeasure, Segment, StepFunction, StringModel, TailModel,
};
use crate::trace::{
    ac_bound_check, jensen_mu_lower, lt_check_f0, lt_check_falpha, perturbation_norms,
    spectral_mass, verify_trace_f0, verify_trace_falpha,
};
use crate::transforms::{
    ch_to_string, ch_weyl, delta_prime_lt_check, delta_prime_to_string, measure_transport_identity,
    substitution_identity, CHData, DeltaPrimeData,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Random model with the linear tail: 1 to 20 steps with values in
/// `[-5, 5]`, up to 5 atoms of mass in `(0.05, 5]`, `R ∈ [0.5, 3]`.
pub fn random_f0_model<R: Rng>(rng: &mut R) -> StringModel {
    random_model(rng, TailModel::Linear)
}

/// As [`random_f0_model`] with a Möbius tail, `α ∈ [0.05, 4]`.
pub fn random_falpha_model<R: Rng>(rng: &mut R) -> StringModel {
    let alpha = rng.gen_range(0.05..=4.0);
    random_model(rng, TailModel::Moebius { alpha })
}

fn random_model<R: Rng>(rng: &mut R, tail: TailModel) -> StringModel {
    let r: f64 = rng.gen_range(0.5..=3.0);
    let steps = rng.gen_range(1..=20usize);
    let mut bp: Vec<f64> = (1..steps).map(|_| rng.gen_range(0.0..r)).collect();
    bp.push(0.0);
    bp.push(r);
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    let values = (1..bp.len()).map(|_| rng.gen_range(-5.0..=5.0)).collect();
    let n_atoms = rng.gen_range(0..=5usize);
    let mut pos: Vec<f64> = (0..n_atoms).map(|_| rng.gen_range(0.0..=r)).collect();
    pos.sort_by(f64::total_cmp);
    pos.dedup();
    let masses = pos.iter().map(|_| 5.0 - rng.gen_range(0.0..4.95)).collect();
    StringModel::new(
        tail,
        StepFunction::new(bp, values),
        DiscreteMeasure::new(pos, masses),
    )
}

pub fn f0_ensemble(seed: u64, count: usize) -> Vec<StringModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_f0_model(&mut rng)).collect()
}

pub fn falpha_ensemble(seed: u64, count: usize) -> Vec<StringModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_falpha_model(&mut rng)).collect()
}

/// One checked quantity: passes when `measured ≤ threshold`.
#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

impl Criterion {
    fn at_most(name: &str, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            threshold,
            passed: measured <= threshold,
            detail: String::new(),
        }
    }

    fn flag(name: &str, ok: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            measured: if ok { 0.0 } else { 1.0 },
            threshold: 0.0,
            passed: ok,
            detail,
        }
    }

    fn failed(name: &str, err: impl std::fmt::Display) -> Self {
        Self::flag(name, false, format!("error: {err}"))
    }

    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!(
            "[{tag}] {}: {:.3e} (limit {:.1e})",
            self.name, self.measured, self.threshold
        );
        if !self.detail.is_empty() {
            s.push_str(" ");
            s.push_str(&self.detail);
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub criteria: Vec<Criterion>,
    pub elapsed_seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Explicit,
    PointMass,
    StepEigenvalue,
    Trace,
    Unimodular,
    Jets,
    Bounds,
    Jensen,
    CamassaHolm,
    DeltaPrime,
    Numerics,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Explicit,
        Suite::PointMass,
        Suite::StepEigenvalue,
        Suite::Trace,
        Suite::Unimodular,
        Suite::Jets,
        Suite::Bounds,
        Suite::Jensen,
        Suite::CamassaHolm,
        Suite::DeltaPrime,
        Suite::Numerics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Explicit => "explicit",
            Suite::PointMass => "point-mass",
            Suite::StepEigenvalue => "step-eigenvalue",
            Suite::Trace => "trace",
            Suite::Unimodular => "unimodular",
            Suite::Jets => "jets",
            Suite::Bounds => "bounds",
            Suite::Jensen => "jensen",
            Suite::CamassaHolm => "camassa-holm",
            Suite::DeltaPrime => "delta-prime",
            Suite::Numerics => "numerics",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    /// Size of each random ensemble.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            samples: 100,
            seed: 20240917,
        }
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> SuiteReport {
    let start = Instant::now();
    let mut criteria = match suite {
        Suite::Explicit => explicit(),
        Suite::PointMass => point_mass(),
        Suite::StepEigenvalue => step_eigenvalue(),
        Suite::Trace => trace(opts),
        Suite::Unimodular => unimodular(opts),
        Suite::Jets => jets(opts),
        Suite::Bounds => bounds(opts),
        Suite::Jensen => jensen(opts),
        Suite::CamassaHolm => camassa_holm(opts),
        Suite::DeltaPrime => delta_prime(),
        Suite::Numerics => numerics(),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let budget = match suite {
        Suite::Explicit => Some(1.0),
        Suite::PointMass | Suite::StepEigenvalue => Some(5.0),
        Suite::Trace => Some(300.0),
        _ => None,
    };
    if let Some(b) = budget {
        criteria.push(Criterion::at_most("runtime seconds", elapsed, b));
    }
    SuiteReport {
        suite: suite.name().into(),
        criteria,
        elapsed_seconds: elapsed,
    }
}

/// Maximum of a fallible per-item measurement; the first error wins.
fn worst<T: Sync, F: Fn(&T) -> Result<f64> + Sync + Send>(items: &[T], f: F) -> Result<f64> {
    let vals: Vec<f64> = items.par_iter().map(f).collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

fn measured(name: &str, threshold: f64, value: Result<f64>) -> Criterion {
    match value {
        Ok(v) if v.is_nan() => Criterion::failed(name, "NaN"),
        Ok(v) => Criterion::at_most(name, v, threshold),
        Err(e) => Criterion::failed(name, e),
    }
}

fn upper_sqrt(w: Complex64) -> Complex64 {
    let s = w.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

fn off_axis_points(seed: u64, count: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let im = rng.gen_range(0.05..5.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            Complex64::new(rng.gen_range(-5.0..5.0), im)
        })
        .collect()
}

fn explicit() -> Vec<Criterion> {
    let zs = off_axis_points(1, 100);
    let lin = StringModel::free(TailModel::Linear);
    let lin_err = worst(&zs, |&z| Ok((weyl_m(&lin, z)? - I / upper_sqrt(z)).norm()));
    let moe_err = worst(&zs, |&z| {
        [0.25, 1.0, 2.5]
            .iter()
            .map(|&alpha| {
                let m = StringModel::free(TailModel::Moebius { alpha });
                let want = I / (upper_sqrt(z - alpha) + I * alpha.sqrt());
                Ok((weyl_m(&m, z)? - want).norm())
            })
            .try_fold(0.0, |acc: f64, v: Result<f64>| Ok(acc.max(v?)))
    });
    let quarter = StringModel::free(TailModel::Moebius { alpha: 0.25 });
    let z = Complex64::new(-1.0, 0.0);
    vec![
        measured("linear R=0 m(z) = i/sqrt(z) at 100 points", 1e-12, lin_err),
        measured("moebius R=0 m(z) closed form at 100 points", 1e-12, moe_err),
        measured(
            "linear m(-1) = 1",
            1e-12,
            weyl_m(&lin, z).map(|m| (m - 1.0).norm()),
        ),
        measured(
            "alpha=1/4 m(-1) = (sqrt5-1)/2",
            1e-12,
            weyl_m(&quarter, z).map(|m| (m - (5f64.sqrt() - 1.0) / 2.0).norm()),
        ),
    ]
}

fn point_mass_model() -> StringModel {
    StringModel::new(
        TailModel::Linear,
        StepFunction::empty(),
        DiscreteMeasure::new(vec![0.0], vec![2.0]),
    )
}

fn point_mass() -> Vec<Criterion> {
    let model = point_mass_model();
    let ks: Vec<f64> = (1..=20).map(|j| 0.25 * j as f64).collect();
    let a_err = ScatteringPair::new(&model).and_then(|pair| {
        worst(&ks, |&k| {
            let (a, _) = pair.ab(Complex64::new(k, 0.0))?;
            let want = Complex64::new(1.0, -k * k * k);
            Ok((a - want).norm() / want.norm())
        })
    });
    let zeros = find_a_zeros(&model, 10.0, 1e-14);
    let zero_err = zeros.map(|(z, _)| {
        if z.len() == 1 {
            (z[0] - 1.0).abs()
        } else {
            f64::INFINITY
        }
    });
    let eig = find_eigenvalues(&model, 10.0, 1e-14);
    let mut out = vec![
        measured("a(k) = 1 - ik^3 at 20 points (relative)", 1e-12, a_err),
        measured("a zeros = {1}", 1e-10, zero_err),
        match eig {
            Ok(e) => Criterion::flag("no eigenvalues", e.is_empty(), format!("{e:?}")),
            Err(e) => Criterion::failed("no eigenvalues", e),
        },
    ];
    match verify_trace_f0(&model, 1e-9) {
        Ok(r) => {
            out.push(Criterion::at_most(
                "boundstate term = 4/3",
                (r.boundstate_term - 4.0 / 3.0).abs(),
                1e-9,
            ));
            out.push(Criterion::at_most(
                "log integral term = 2/3",
                (r.log_integral_term - 2.0 / 3.0).abs(),
                1e-7,
            ));
            out.push(Criterion::flag(
                "rhs = 2 exactly",
                r.rhs == 2.0,
                format!("rhs = {}", r.rhs),
            ));
        }
        Err(e) => out.push(Criterion::failed("point-mass trace report", e)),
    }
    out
}

fn step_eigenvalue() -> Vec<Criterion> {
    let model = StringModel::new(
        TailModel::Linear,
        StepFunction::new(vec![0.0, 1.0], vec![2.0]),
        DiscreteMeasure::default(),
    );
    let want = -(3.0 + 5f64.sqrt()) / 2.0;
    let eig = find_eigenvalues(&model, 10.0, 1e-14).map(|e| {
        if e.len() == 1 {
            (e[0] - want).abs()
        } else {
            f64::INFINITY
        }
    });
    let mut out = vec![measured("eigenvalue -(3+sqrt5)/2", 1e-9, eig)];
    match lt_check_f0(&model) {
        Ok(b) => {
            let lhs_want = (4.0 / 3.0) * want.abs().powf(-1.5);
            out.push(Criterion::at_most(
                "LT lhs = (4/3)|lambda|^-1.5",
                (b.lhs - lhs_want).abs(),
                1e-9,
            ));
            out.push(Criterion::at_most(
                "LT rhs = 7/3",
                (b.rhs - 7.0 / 3.0).abs(),
                1e-14,
            ));
            out.push(Criterion::flag(
                "LT holds",
                b.holds,
                format!("{:.6} <= {:.6}", b.lhs, b.rhs),
            ));
        }
        Err(e) => out.push(Criterion::failed("LT check", e)),
    }
    out
}

fn trace(opts: &SuiteOptions) -> Vec<Criterion> {
    let f0 = f0_ensemble(opts.seed, opts.samples);
    let fa = falpha_ensemble(opts.seed + 1, opts.samples);
    let f0_reports: Vec<_> = f0.par_iter().map(|m| verify_trace_f0(m, 1e-6)).collect();
    let fa_reports: Vec<_> = fa
        .par_iter()
        .map(|m| verify_trace_falpha(m, 1e-5))
        .collect();
    let mut out = Vec::new();
    let collect = |rs: &[Result<f64>]| -> Result<f64> {
        rs.iter().try_fold(0.0, |acc: f64, r| {
            Ok(acc.max(*r.as_ref().map_err(|e| e.clone())?))
        })
    };
    let f0_res: Vec<Result<f64>> = f0_reports
        .iter()
        .map(|r| r.as_ref().map(|r| r.residual).map_err(Clone::clone))
        .collect();
    out.push(measured("F0 identity residual", 1e-6, collect(&f0_res)));
    let negative = f0_reports
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .filter(|r| r.boundstate_term < 0.0 || r.log_integral_term < 0.0)
        .count();
    out.push(Criterion::flag(
        "F0 lhs terms non-negative",
        negative == 0,
        format!("{negative} negative"),
    ));
    let r1: Vec<Result<f64>> = fa_reports
        .iter()
        .map(|r| r.as_ref().map(|r| r.0.residual).map_err(Clone::clone))
        .collect();
    let r2: Vec<Result<f64>> = fa_reports
        .iter()
        .map(|r| r.as_ref().map(|r| r.1.residual).map_err(Clone::clone))
        .collect();
    let rec: Vec<Result<f64>> = fa_reports
        .iter()
        .map(|r| {
            r.as_ref()
                .map(|r| r.1.recombination_residual.unwrap_or(0.0))
                .map_err(Clone::clone)
        })
        .collect();
    out.push(measured(
        "F_alpha first identity residual",
        1e-5,
        collect(&r1),
    ));
    out.push(measured(
        "F_alpha second identity residual",
        1e-5,
        collect(&r2),
    ));
    out.push(measured(
        "F-function recombination residual",
        1e-10,
        collect(&rec),
    ));
    out
}

fn random_points(seed: u64, count: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.1..2.0)))
        .collect()
}

fn unimodular(opts: &SuiteOptions) -> Vec<Criterion> {
    let f0 = f0_ensemble(opts.seed + 2, opts.samples);
    let fa = falpha_ensemble(opts.seed + 3, opts.samples);
    let all: Vec<StringModel> = f0.iter().chain(&fa).cloned().collect();
    let zs = random_points(opts.seed + 4, 4);
    // Rounding in ad - bc scales with the squared size of the entries.
    let det_err = worst(&all, |m| {
        let mut e: f64 = 0.0;
        for &z in &zs {
            for s in m.segments() {
                let t = match s {
                    Segment::Interval { w, len } => interval_transfer(z, w, len)?,
                    Segment::Atom { mass } => mass_jump(z, mass)?,
                };
                let scale = t.iter().flatten().map(|v| v.norm()).fold(1.0, f64::max);
                e = e.max((det(&t) - 1.0).norm() / (scale * scale));
            }
        }
        Ok(e)
    });
    let wr_err = worst(&all, |m| {
        zs.iter().try_fold(0.0, |acc: f64, &z| {
            let fs = fundamental_system(m, z)?;
            let scale = (fs.theta * fs.phi1)
                .norm()
                .max((fs.phi * fs.theta1).norm())
                .max(1.0);
            Ok(acc.max((fs.wronskian() - 1.0).norm() / scale))
        })
    });
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed + 5);
    let ks: Vec<f64> = (0..8).map(|_| rng.gen_range(0.05..20.0)).collect();
    let ab_err = worst(&all, |m| {
        let pair = ScatteringPair::new(m)?;
        ks.iter().try_fold(0.0, |acc: f64, &k| {
            let (a, b) = pair.ab(Complex64::new(k, 0.0))?;
            Ok(acc.max((a.norm_sqr() - b.norm_sqr() - 1.0).abs() / a.norm_sqr().max(1.0)))
        })
    });
    let a_alpha = worst(&fa, |m| {
        let pair = ScatteringPair::new(m)?;
        let (a, _) = pair.ab(I * pair.sqrt_alpha())?;
        Ok((a - 1.0).norm())
    });
    vec![
        measured(
            "|det - 1| per transfer factor (relative to entry size squared)",
            1e-14,
            det_err,
        ),
        measured("Wronskian residual (relative to term size)", 1e-10, wr_err),
        measured("|a|^2 - |b|^2 - 1 (relative to |a|^2)", 1e-10, ab_err),
        measured("a(i sqrt(alpha)) = 1", 1e-12, a_alpha),
    ]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn jets(opts: &SuiteOptions) -> Vec<Criterion> {
    let f0 = f0_ensemble(opts.seed + 6, opts.samples);
    let fa = falpha_ensemble(opts.seed + 7, opts.samples);
    let all: Vec<StringModel> = f0.iter().chain(&fa).cloned().collect();
    let jet_err = worst(&all, |m| {
        let [th, th1, ph, ph1] = fundamental_jet(m, Complex64::new(0.0, 0.0), 2)?;
        let c = closed_form_jets(m)?;
        let pairs = [
            (th.derivative(1), c.theta_dot),
            (th1.derivative(1), c.theta1_dot),
            (ph.derivative(1), c.phi_dot),
            (ph1.derivative(1), c.phi1_dot),
            (th.derivative(2), c.theta_ddot),
            (th1.derivative(2), c.theta1_ddot),
            (ph1.derivative(2), c.phi1_ddot),
        ];
        Ok(pairs
            .iter()
            .map(|(j, w)| rel(j.re, *w).max(j.im.abs()))
            .fold(0.0, f64::max))
    });
    let a3_err = worst(&f0, |m| {
        let a = crate::scattering::a_jet(m)?;
        let n0 = perturbation_norms(m)?.n0;
        let want = Complex64::new(0.0, -n0 / 2.0);
        Ok((a.coeff(3) - want).norm() / want.norm().max(1e-300))
    });
    vec![
        measured(
            "fundamental jets vs closed forms (relative)",
            1e-10,
            jet_err,
        ),
        measured(
            "a_jet cubic coefficient = -i n0/2 (relative)",
            1e-10,
            a3_err,
        ),
    ]
}

fn bounds(opts: &SuiteOptions) -> Vec<Criterion> {
    let f0 = f0_ensemble(opts.seed + 8, opts.samples);
    let fa = falpha_ensemble(opts.seed + 9, opts.samples);
    let count = |items: &[StringModel],
                 f: &(dyn Fn(&StringModel) -> Result<bool> + Sync)|
     -> Result<usize> {
        let v: Vec<bool> = items.par_iter().map(f).collect::<Result<_>>()?;
        Ok(v.into_iter().filter(|ok| !ok).count())
    };
    let as_crit = |name: &str, r: Result<usize>| match r {
        Ok(n) => Criterion::flag(name, n == 0, format!("{n} violations")),
        Err(e) => Criterion::failed(name, e),
    };
    vec![
        as_crit(
            "F0 Lieb-Thirring bound",
            count(&f0, &|m| Ok(lt_check_f0(m)?.holds)),
        ),
        as_crit(
            "F_alpha Lieb-Thirring bound",
            count(&fa, &|m| Ok(lt_check_falpha(m)?.holds)),
        ),
        as_crit(
            "F0 absolutely continuous bound on [1, 2]",
            count(&f0, &|m| Ok(ac_bound_check(m, 1.0, 2.0)?.holds)),
        ),
        as_crit(
            "F_alpha absolutely continuous bound on [alpha+1, alpha+2]",
            count(&fa, &|m| {
                let a = m.tail.edge();
                Ok(ac_bound_check(m, a + 1.0, a + 2.0)?.holds)
            }),
        ),
    ]
}

fn jensen(opts: &SuiteOptions) -> Vec<Criterion> {
    let models = f0_ensemble(opts.seed + 10, 20);
    let d = jensen_mu_lower(1.0, 2.0, 0.0, TailModel::Linear).map(|d| (d - 0.0342972).abs());
    let margin = models
        .par_iter()
        .map(|m| {
            let n0 = perturbation_norms(m)?.n0;
            Ok(spectral_mass(m, 1.0, 2.0)? - jensen_mu_lower(1.0, 2.0, n0, TailModel::Linear)?)
        })
        .collect::<Result<Vec<f64>>>()
        .map(|v| v.into_iter().fold(f64::INFINITY, f64::min));
    vec![
        measured("D_Omega for [1, 2] near 0.0342972", 1e-5, d),
        measured(
            "-(mu(Omega) - Jensen lower bound), 20 models",
            0.0,
            margin.map(|m| -m),
        ),
    ]
}

/// Invariant checks on a single model: Wronskian, `|a|² − |b|² = 1`,
/// the trace identities, the Lieb-Thirring bound and the absolutely
/// continuous bound on `[edge + 1, edge + 2]`.
pub fn check_model(model: &StringModel, tol: f64) -> SuiteReport {
    let start = Instant::now();
    let mut out = Vec::new();
    let zs = random_points(17, 8);
    out.push(measured(
        "Wronskian residual (relative to term size)",
        1e-10,
        zs.iter().try_fold(0.0, |acc: f64, &z| {
            let fs = fundamental_system(model, z)?;
            let scale = (fs.theta * fs.phi1)
                .norm()
                .max((fs.phi * fs.theta1).norm())
                .max(1.0);
            Ok(acc.max((fs.wronskian() - 1.0).norm() / scale))
        }),
    ));
    out.push(measured(
        "|a|^2 - |b|^2 - 1 (relative to |a|^2)",
        1e-10,
        ScatteringPair::new(&model.normalized()).and_then(|pair| {
            (1..=50).try_fold(0.0, |acc: f64, j| {
                let (a, b) = pair.ab(Complex64::new(0.2 * j as f64, 0.0))?;
                Ok(acc.max((a.norm_sqr() - b.norm_sqr() - 1.0).abs() / a.norm_sqr().max(1.0)))
            })
        }),
    ));
    match model.tail {
        TailModel::Linear => {
            out.push(measured(
                "F0 identity residual",
                tol,
                verify_trace_f0(model, tol).map(|r| r.residual),
            ));
            out.push(match lt_check_f0(model) {
                Ok(b) => Criterion::flag(
                    "Lieb-Thirring bound",
                    b.holds,
                    format!("{:.6e} <= {:.6e}", b.lhs, b.rhs),
                ),
                Err(e) => Criterion::failed("Lieb-Thirring bound", e),
            });
        }
        TailModel::Moebius { .. } => {
            let r = verify_trace_falpha(model, tol);
            out.push(measured(
                "F_alpha first identity residual",
                tol,
                r.as_ref().map(|r| r.0.residual).map_err(Clone::clone),
            ));
            out.push(measured(
                "F_alpha second identity residual",
                tol,
                r.map(|r| r.1.residual),
            ));
            out.push(match lt_check_falpha(model) {
                Ok(b) => Criterion::flag(
                    "Lieb-Thirring bound",
                    b.holds,
                    format!("{:.6e} <= {:.6e}", b.lhs, b.rhs),
                ),
                Err(e) => Criterion::failed("Lieb-Thirring bound", e),
            });
        }
    }
    let edge = model.tail.edge();
    out.push(match ac_bound_check(model, edge + 1.0, edge + 2.0) {
        Ok(b) => Criterion::flag(
            "absolutely continuous bound",
            b.holds,
            format!("{:.6e} <= {:.6e}", b.lhs, b.rhs),
        ),
        Err(e) => Criterion::failed("absolutely continuous bound", e),
    });
    SuiteReport {
        suite: "model".into(),
        criteria: out,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    }
}

fn random_test_function<R: Rng>(rng: &mut R) -> PiecewiseLinear {
    let n = rng.gen_range(2..=8usize);
    let end: f64 = rng.gen_range(1.0..4.0);
    let mut xs: Vec<f64> = (1..n).map(|_| rng.gen_range(0.0..end)).collect();
    xs.push(0.0);
    xs.push(end);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut ys: Vec<f64> = xs.iter().map(|_| rng.gen_range(-2.0..2.0)).collect();
    *ys.last_mut().unwrap() = 0.0;
    PiecewiseLinear::new(xs, ys).expect("sorted distinct samples")
}

fn camassa_holm(opts: &SuiteOptions) -> Vec<Criterion> {
    let data = CHData::new(
        RealFunction::closed(|_| 1.0),
        RealFunction::closed(|_| 0.0),
        50.0,
    );
    let grid: Vec<f64> = (0..=1000).map(|j| j as f64 * 0.1).collect();
    let z = Complex64::new(-1.0, 0.0);
    let pipeline = ch_to_string(&data, &grid).and_then(|g| {
        let tail_ok = g.tail == TailModel::Moebius { alpha: 0.25 };
        let model = approximate(&g, 1000)?;
        let ms = weyl_m(&model, z)?;
        let m = ch_weyl(ms, z)?;
        Ok((
            tail_ok,
            (ms - (5f64.sqrt() - 1.0) / 2.0).norm(),
            (m - 5f64.sqrt() / 2.0).norm(),
        ))
    });
    let mut out = match pipeline {
        Ok((tail_ok, es, e)) => vec![
            Criterion::flag("u = 1 maps to the alpha = 1/4 tail", tail_ok, String::new()),
            Criterion::at_most("string m(-1) = (sqrt5-1)/2 after approximation", es, 1e-8),
            Criterion::at_most("Camassa-Holm m(-1) = sqrt5/2", e, 1e-8),
        ],
        Err(e) => vec![Criterion::failed("Camassa-Holm pipeline", e)],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed + 11);
    let pairs: Vec<(PiecewiseLinear, PiecewiseLinear, Vec<(f64, f64)>)> = (0..50)
        .map(|_| {
            let g = random_test_function(&mut rng);
            let h = random_test_function(&mut rng);
            let atoms = (0..4)
                .map(|_| (rng.gen_range(0.0..4.0), rng.gen_range(0.0..3.0)))
                .collect();
            (g, h, atoms)
        })
        .collect();
    out.push(measured(
        "substitution identity residual, 50 pairs",
        1e-8,
        worst(
            &pairs,
            |(g, h, _)| Ok(substitution_identity(g, h)?.residual),
        ),
    ));
    out.push(measured(
        "measure transport residual, 50 pairs",
        1e-10,
        worst(&pairs, |(g, h, a)| {
            Ok(measure_transport_identity(g, h, a)?.residual)
        }),
    ));
    out
}

fn delta_prime() -> Vec<Criterion> {
    let data = DeltaPrimeData::new(vec![1.0], vec![2.0]);
    let general = match delta_prime_to_string(&data) {
        Ok(g) => g,
        Err(e) => return vec![Criterion::failed("delta-prime mapping", e)],
    };
    let exact = (0..=64)
        .map(|j| j as f64 / 16.0)
        .filter(|&x| x != 1.0)
        .all(|x| general.w.eval(x) == x + if x > 1.0 { 2.0 } else { 0.0 });
    let c = general.scaling.map_or(f64::NAN, |s| s.c);
    let mut out = vec![
        Criterion::flag("W = x + 2 on (1, inf), x before", exact, String::new()),
        Criterion::at_most("fitted c = 2", (c - 2.0).abs(), 0.0),
    ];
    let lt = eigenvalues_of(&general).and_then(|ev| delta_prime_lt_check(&data, &ev, None));
    match lt {
        Ok(r) => {
            out.push(Criterion::flag(
                "LT-type bound holds",
                r.holds,
                format!("{:.6} <= {:.6}", r.lhs, r.rhs),
            ));
            out.push(Criterion::at_most(
                "3/4 vs 4/3 rearrangement residual",
                r.consistency_residual,
                1e-12,
            ));
        }
        Err(e) => out.push(Criterion::failed("delta-prime LT check", e)),
    }
    out
}

fn eigenvalues_of(general: &GeneralCoefficients) -> Result<Vec<f64>> {
    let model = approximate(general, 200)?;
    let pair = ScatteringPair::new(&model.normalized())?;
    Ok(pair.bound_states(None, 1e-13)?.eigenvalues)
}

fn numerics() -> Vec<Criterion> {
    let r = adaptive_integrate(
        |k: f64| (k.powi(6)).ln_1p() / k.powi(4),
        0.0,
        Upper::Infinity,
        1e-10,
    );
    vec![measured(
        "integral of log(1+k^6)/k^4 = pi/3",
        1e-8,
        r.map(|r| (r.value - PI / 3.0).abs()),
    )]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ensembles_are_reproducible_and_valid() {
        let a = f0_ensemble(7, 20);
        assert_eq!(a, f0_ensemble(7, 20));
        for m in a.iter().chain(&falpha_ensemble(8, 20)) {
            m.validate().unwrap();
            assert!(m.r >= 0.5 && m.r <= 3.0);
            assert!(m.upsilon.masses.iter().all(|&w| w > 0.05 && w <= 5.0));
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()), Some(s));
        }
    }
}
