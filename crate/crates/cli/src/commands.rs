use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gis_spectra::approximation::{
    approximate_detailed, GeneralCoefficients, PiecewiseLinear, RealFunction,
};
use gis_spectra::io::{model_from_json, model_to_json, CoefficientMeta, MeasureSpec, SampleTable};
use gis_spectra::scattering::{bound_states, spectral_density, weyl_m, ScatteringPair};
use gis_spectra::string_core::{ScalingParams, StringModel, TailModel};
use gis_spectra::trace::{
    ac_bound_check, jensen_mu_lower, lt_check_f0, lt_check_falpha, perturbation_norms,
    spectral_mass, verify_trace_f0, verify_trace_falpha,
};
use gis_spectra::transforms::{
    ch_condition_check, ch_to_string, delta_prime_lt_check, delta_prime_to_string, CHData,
    DeltaPrimeData,
};
use gis_spectra::verify::{check_model, run_suite, Suite, SuiteOptions, SuiteReport};
use gis_spectra::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::files::{write_atomic, write_csv, write_json, Inputs};

#[derive(Debug, Parser)]
#[command(
    name = "gis-spectra",
    version,
    about = "Spectral computations for generalized indefinite strings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weyl-Titchmarsh function at complex points.
    Weyl(WeylArgs),
    /// Spectral density on a grid of the absolutely continuous spectrum.
    Density(DensityArgs),
    /// Zeros of a on the imaginary axis and the eigenvalues.
    BoundStates(BoundStatesArgs),
    /// Trace formula residuals.
    Trace(TraceArgs),
    /// Lieb-Thirring type bound.
    LtCheck(ModelOnly),
    /// Absolutely continuous spectrum bound and Jensen lower bound on an interval.
    AcBound(AcArgs),
    /// Reduce sampled coefficients to an exactly solvable model.
    Approx(ApproxArgs),
    /// Camassa-Holm data to a string model.
    ChTransform(ChArgs),
    /// δ′-interaction data to a string model.
    DeltaPrime(DeltaArgs),
    /// Run invariant suites, or the checks for one model.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ModelOnly {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct WeylArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Evaluation point as "re,im"; repeatable.
    #[arg(long = "z", value_parser = parse_complex, allow_hyphen_values = true, required = true)]
    pub z: Vec<Complex64>,
    /// CSV with columns re_z, im_z, re_m, im_m.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// CSV with columns lambda, rho.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundStatesArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub kappa_max: Option<f64>,
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TraceArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AcArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Lower end of Ω in the normalized spectral variable; defaults to edge + 1.
    #[arg(long)]
    pub omega_lo: Option<f64>,
    #[arg(long)]
    pub omega_hi: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ApproxArgs {
    /// CSV with columns x, W.
    #[arg(long)]
    pub samples: PathBuf,
    /// Coefficient metadata JSON (tail, extent, scaling, kinks, measure); overrides the flags below.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    /// Measure JSON: {"atoms": [[x, m], ...], "density": {"x": [...], "values": [...]}}.
    #[arg(long)]
    pub measure: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Output model JSON.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ChArgs {
    /// CSV with columns x, u, uprime.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub measure: Option<PathBuf>,
    /// Number of t-grid points, uniform in x = log(1 + t).
    #[arg(long, default_value_t = 4001)]
    pub points: usize,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Output model JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Writes PREFIX.csv (x, W) and PREFIX.json (metadata) for `approx`.
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DeltaArgs {
    /// JSON {"positions": [...], "strengths": [...]}.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    /// Output model JSON.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Suite name or "all".
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Check this model instead of the built-in suites.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = SuiteOptions::default().seed)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected \"re,im\", got \"{s}\""))?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t}: {e}"));
    Ok(Complex64::new(p(re)?, p(im)?))
}

/// Report written to `--out`/`--report`: inputs with digests, options, result.
#[derive(Serialize)]
struct Envelope<'a, O: Serialize, R: Serialize> {
    command: &'a str,
    inputs: &'a Inputs,
    options: &'a O,
    result: R,
}

/// Printed on standard output after a successful run.
#[derive(Serialize)]
pub struct Summary {
    command: &'static str,
    status: &'static str,
    inputs: Inputs,
    outputs: Vec<String>,
    result: Value,
}

struct Run {
    command: &'static str,
    inputs: Inputs,
    outputs: Vec<String>,
}

impl Run {
    fn new(command: &'static str) -> Self {
        Self {
            command,
            inputs: Inputs::default(),
            outputs: Vec::new(),
        }
    }

    fn model(&mut self, path: &Path) -> CliResult<StringModel> {
        let text = self.inputs.read(path)?;
        Ok(model_from_json(&text)?)
    }

    fn report<O: Serialize, R: Serialize>(
        &mut self,
        path: Option<&PathBuf>,
        options: &O,
        result: &R,
    ) -> CliResult<()> {
        if let Some(p) = path {
            let env = Envelope {
                command: self.command,
                inputs: &self.inputs,
                options,
                result,
            };
            write_json(p, &env)?;
            self.outputs.push(p.display().to_string());
        }
        Ok(())
    }

    fn written(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    fn finish(self, result: Value) -> Summary {
        Summary {
            command: self.command,
            status: "ok",
            inputs: self.inputs,
            outputs: self.outputs,
            result,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

pub fn run(cli: Cli) -> CliResult<Summary> {
    match cli.command {
        Command::Weyl(a) => weyl(a),
        Command::Density(a) => density(a),
        Command::BoundStates(a) => bound_states_cmd(a),
        Command::Trace(a) => trace(a),
        Command::LtCheck(a) => lt_check(a),
        Command::AcBound(a) => ac_bound(a),
        Command::Approx(a) => approx(a),
        Command::ChTransform(a) => ch_transform(a),
        Command::DeltaPrime(a) => delta_prime(a),
        Command::Verify(a) => verify(a),
    }
}

fn weyl(a: WeylArgs) -> CliResult<Summary> {
    let mut run = Run::new("weyl");
    let model = run.model(&a.model)?;
    let rows: Vec<Vec<f64>> =
        a.z.iter()
            .map(|&z| weyl_m(&model, z).map(|m| vec![z.re, z.im, m.re, m.im]))
            .collect::<Result<_, _>>()?;
    if let Some(out) = &a.out {
        write_csv(out, &["re_z", "im_z", "re_m", "im_m"], &rows)?;
        run.written(out);
    }
    Ok(run.finish(
        json!({ "options": a, "m": rows.iter().map(|r| [r[2], r[3]]).collect::<Vec<_>>() }),
    ))
}

fn density(a: DensityArgs) -> CliResult<Summary> {
    let mut run = Run::new("density");
    let model = run.model(&a.model)?;
    if !(a.lambda_max > a.lambda_min) || a.points < 2 {
        return Err(CliError::Validation(
            "need lambda-max > lambda-min and at least two points".into(),
        ));
    }
    let rows: Vec<Vec<f64>> = (0..a.points)
        .map(|j| {
            let l = a.lambda_min + (a.lambda_max - a.lambda_min) * j as f64 / (a.points - 1) as f64;
            spectral_density(&model, l).map(|s| vec![s.lambda, s.rho])
        })
        .collect::<Result<_, _>>()?;
    write_csv(&a.out, &["lambda", "rho"], &rows)?;
    run.written(&a.out);
    Ok(run.finish(json!({ "options": a, "points": rows.len() })))
}

fn bound_states_cmd(a: BoundStatesArgs) -> CliResult<Summary> {
    let mut run = Run::new("bound-states");
    let model = run.model(&a.model)?;
    let set = bound_states(&model, a.kappa_max, a.tol)?;
    run.report(a.out.as_ref(), &a, &set)?;
    Ok(run.finish(
        json!({ "eigenvalues": set.eigenvalues, "kappas": set.kappas, "dips": set.dips.len() }),
    ))
}

fn trace(a: TraceArgs) -> CliResult<Summary> {
    let mut run = Run::new("trace");
    let model = run.model(&a.model)?;
    if !(a.tol > 0.0) {
        return Err(CliError::Validation("tol must be positive".into()));
    }
    let reports = match model.tail {
        TailModel::Linear => vec![verify_trace_f0(&model, a.tol)?],
        TailModel::Moebius { .. } => {
            let (r1, r2) = verify_trace_falpha(&model, a.tol)?;
            vec![r1, r2]
        }
    };
    let result = if reports.len() == 1 {
        to_value(&reports[0])
    } else {
        to_value(&reports)
    };
    run.report(a.out.as_ref(), &a, &result)?;
    if let Some(r) = reports.iter().find(|r| !r.converged) {
        return Err(CliError::Verification(format!(
            "trace residual {:.3e} exceeds {:.1e}",
            r.residual, a.tol
        )));
    }
    Ok(run.finish(result))
}

fn lt_check(a: ModelOnly) -> CliResult<Summary> {
    let mut run = Run::new("lt-check");
    let model = run.model(&a.model)?;
    let check = match model.tail {
        TailModel::Linear => lt_check_f0(&model)?,
        TailModel::Moebius { .. } => lt_check_falpha(&model)?,
    };
    run.report(a.out.as_ref(), &a, &check)?;
    if !check.holds {
        return Err(CliError::Verification(format!(
            "Lieb-Thirring bound violated: {} > {}",
            check.lhs, check.rhs
        )));
    }
    Ok(run.finish(to_value(&check)))
}

fn ac_bound(a: AcArgs) -> CliResult<Summary> {
    let mut run = Run::new("ac-bound");
    let model = run.model(&a.model)?;
    let edge = model.tail.edge();
    let lo = a.omega_lo.unwrap_or(edge + 1.0);
    let hi = a.omega_hi.unwrap_or(lo + 1.0);
    let check = ac_bound_check(&model, lo, hi)?;
    let norms = perturbation_norms(&model.normalized())?;
    let rhs = if model.alpha().is_some() {
        norms.a2
    } else {
        norms.n0
    };
    let result = json!({
        "omega": [lo, hi],
        "check": check,
        "spectral_mass": spectral_mass(&model, lo, hi)?,
        "jensen_lower": jensen_mu_lower(lo, hi, rhs, model.tail)?,
    });
    run.report(a.out.as_ref(), &a, &result)?;
    if !check.holds {
        return Err(CliError::Verification(format!(
            "AC bound violated: {} > {}",
            check.lhs, check.rhs
        )));
    }
    Ok(run.finish(result))
}

fn approx(a: ApproxArgs) -> CliResult<Summary> {
    let mut run = Run::new("approx");
    let cols = run.inputs.csv_columns(&a.samples, &["x", "W"])?;
    let table = SampleTable {
        x: cols[0].clone(),
        values: cols[1].clone(),
    };
    let general = match &a.meta {
        Some(p) => run.inputs.json::<CoefficientMeta>(p)?.with_samples(table)?,
        None => {
            let tail = match a.alpha {
                Some(alpha) => TailModel::Moebius { alpha },
                None => TailModel::Linear,
            };
            let extent = table.x.last().copied().unwrap_or(0.0);
            let mut g = GeneralCoefficients::new(table.to_function()?, extent, tail);
            if let Some(p) = &a.measure {
                g.upsilon = run.inputs.json::<MeasureSpec>(p)?.to_measure()?;
            }
            if a.c.is_some() || a.eta.is_some() {
                g.scaling = Some(ScalingParams {
                    c: a.c.unwrap_or(0.0),
                    eta: a.eta.unwrap_or(1.0),
                });
            }
            g
        }
    };
    let approx = approximate_detailed(&general, a.n)?;
    write_atomic(&a.out, model_to_json(&approx.model).as_bytes())?;
    run.written(&a.out);
    let result = approximation_summary(&approx);
    run.report(a.report.as_ref(), &a, &result)?;
    Ok(run.finish(result))
}

fn approximation_summary(a: &gis_spectra::approximation::Approximation) -> Value {
    json!({
        "n": a.n,
        "R_n": a.r_n,
        "cells": a.cells,
        "tail_error": a.tail_error,
        "cell_error": a.cell_error,
        "condition": a.condition,
        "atoms": a.model.upsilon.positions.len(),
    })
}

fn ch_transform(a: ChArgs) -> CliResult<Summary> {
    let mut run = Run::new("ch-transform");
    let cols = run.inputs.csv_columns(&a.data, &["x", "u", "uprime"])?;
    let extent = cols[0].last().copied().unwrap_or(0.0);
    let mut data = CHData::new(
        RealFunction::Sampled(PiecewiseLinear::new(cols[0].clone(), cols[1].clone())?),
        RealFunction::Sampled(PiecewiseLinear::new(cols[0].clone(), cols[2].clone())?),
        extent,
    );
    if let Some(p) = &a.measure {
        data.upsilon = run.inputs.json::<MeasureSpec>(p)?.to_measure()?;
    }
    if a.points < 2 {
        return Err(CliError::Validation("need at least two grid points".into()));
    }
    let grid: Vec<f64> = (0..a.points)
        .map(|j| (extent * j as f64 / (a.points - 1) as f64).exp_m1())
        .collect();
    let condition = ch_condition_check(&data)?;
    let general = ch_to_string(&data, &grid)?;
    if let Some(prefix) = &a.bundle {
        let csv_path = prefix.with_extension("csv");
        let json_path = prefix.with_extension("json");
        let w = SampleTable::sample(&general.w, &grid);
        write_csv(
            &csv_path,
            &["x", "W"],
            &w.x.iter()
                .zip(&w.values)
                .map(|(x, v)| vec![*x, *v])
                .collect::<Vec<_>>(),
        )?;
        write_json(&json_path, &CoefficientMeta::of(&general, &grid))?;
        run.written(&csv_path);
        run.written(&json_path);
    }
    let approx = approximate_detailed(&general, a.n)?;
    write_atomic(&a.out, model_to_json(&approx.model).as_bytes())?;
    run.written(&a.out);
    let result = json!({ "condition": condition, "approximation": approximation_summary(&approx) });
    run.report(a.report.as_ref(), &a, &result)?;
    Ok(run.finish(result))
}

fn delta_prime(a: DeltaArgs) -> CliResult<Summary> {
    let mut run = Run::new("delta-prime");
    let data: DeltaPrimeData = run.inputs.json(&a.input)?;
    let general = delta_prime_to_string(&data)?;
    let approx = approximate_detailed(&general, a.n)?;
    write_atomic(&a.out, model_to_json(&approx.model).as_bytes())?;
    run.written(&a.out);
    let pair = ScatteringPair::new(&approx.model.normalized())?;
    let eigenvalues = pair.bound_states(None, 1e-13)?.eigenvalues;
    let lt = delta_prime_lt_check(&data, &eigenvalues, None)?;
    let result = json!({
        "approximation": approximation_summary(&approx),
        "eigenvalues": eigenvalues,
        "lt_check": lt,
    });
    run.report(a.report.as_ref(), &a, &result)?;
    if !lt.holds {
        return Err(CliError::Verification(format!(
            "δ′ bound violated: {} > {}",
            lt.lhs, lt.rhs
        )));
    }
    Ok(run.finish(result))
}

fn verify(a: VerifyArgs) -> CliResult<Summary> {
    let mut run = Run::new("verify");
    let reports: Vec<SuiteReport> = match &a.model {
        Some(p) => {
            let model = run.model(p)?;
            vec![check_model(&model, a.tol)]
        }
        None => {
            let suites: Vec<Suite> = if a.suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![Suite::from_name(&a.suite)
                    .ok_or_else(|| CliError::Validation(format!("unknown suite '{}'", a.suite)))?]
            };
            let opts = SuiteOptions {
                samples: a.samples,
                seed: a.seed,
            };
            suites.into_iter().map(|s| run_suite(s, &opts)).collect()
        }
    };
    for r in &reports {
        for c in &r.criteria {
            eprintln!("{} {}", r.suite, c.line());
        }
    }
    run.report(a.out.as_ref(), &a, &reports)?;
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| {
            r.criteria
                .iter()
                .filter(|c| !c.passed)
                .map(move |c| format!("{}: {}", r.suite, c.name))
        })
        .collect();
    if !failed.is_empty() {
        return Err(CliError::Verification(failed.join("; ")));
    }
    Ok(run.finish(
        json!({ "suites": reports.iter().map(|r| (&r.suite, r.passed())).collect::<Vec<_>>() }),
    ))
}
