use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::quadrature::integrate_with;
use crate::numerics::{QuadratureOptions, Upper};
use crate::string_core::{ScalingParams, TailModel};

/// Continuous piecewise linear interpolant, constant beyond its end points.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "{} abscissae for {} samples",
                xs.len(),
                ys.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "sample abscissae must be strictly increasing".into(),
            ));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sample table".into()));
        }
        Ok(Self { xs, ys })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    fn segment(&self, x: f64) -> Option<usize> {
        if x < self.xs[0] || x >= *self.xs.last().unwrap() {
            return None;
        }
        Some(self.xs.partition_point(|&p| p <= x) - 1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.segment(x) {
            Some(i) => {
                let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
                self.ys[i] + t * (self.ys[i + 1] - self.ys[i])
            }
            None if x < self.xs[0] => self.ys[0],
            None => *self.ys.last().unwrap(),
        }
    }

    /// Right derivative; zero outside the table.
    pub fn slope(&self, x: f64) -> f64 {
        match self.segment(x) {
            Some(i) => (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i]),
            None => 0.0,
        }
    }
}

/// A real function given by samples or by a closure.
#[derive(Clone)]
pub enum RealFunction {
    Sampled(PiecewiseLinear),
    Closed(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealFunction::Sampled(p) => write!(f, "Sampled({} points)", p.xs.len()),
            RealFunction::Closed(_) => write!(f, "Closed(..)"),
        }
    }
}

impl RealFunction {
    pub fn closed<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        RealFunction::Closed(Arc::new(f))
    }

    pub fn sampled(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        Ok(RealFunction::Sampled(PiecewiseLinear::new(xs, ys)?))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            RealFunction::Sampled(p) => p.eval(x),
            RealFunction::Closed(f) => f(x),
        }
    }

    /// Points where a sampled function may have kinks.
    pub fn kinks(&self) -> &[f64] {
        match self {
            RealFunction::Sampled(p) => p.xs(),
            RealFunction::Closed(_) => &[],
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self, RealFunction::Sampled(_))
    }
}

/// A finite non-negative measure: optional density plus atoms `(position, mass)`.
#[derive(Debug, Clone, Default)]
pub struct GeneralMeasure {
    pub density: Option<RealFunction>,
    pub atoms: Vec<(f64, f64)>,
}

impl GeneralMeasure {
    pub fn atoms(atoms: Vec<(f64, f64)>) -> Self {
        Self {
            density: None,
            atoms,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for &(x, m) in &self.atoms {
            if !(x >= 0.0 && x.is_finite() && m >= 0.0 && m.is_finite()) {
                return Err(Error::InvalidArgument(format!("invalid atom ({x}, {m})")));
            }
        }
        Ok(())
    }
}

/// General string coefficients: `W` on `[0, extent]`, equal to
/// `c + η·tail(x)` beyond `extent`, and a measure supported in `[0, extent]`.
#[derive(Debug, Clone)]
pub struct GeneralCoefficients {
    pub w: RealFunction,
    pub extent: f64,
    pub upsilon: GeneralMeasure,
    pub tail: TailModel,
    /// Declared `(c, η)`; fitted from the tail when absent.
    pub scaling: Option<ScalingParams>,
    /// Known jump or kink locations of `W` and of the density.
    pub kinks: Vec<f64>,
}

impl GeneralCoefficients {
    pub fn new(w: RealFunction, extent: f64, tail: TailModel) -> Self {
        Self {
            w,
            extent,
            upsilon: GeneralMeasure::default(),
            tail,
            scaling: None,
            kinks: Vec::new(),
        }
    }

    pub fn with_measure(mut self, upsilon: GeneralMeasure) -> Self {
        self.upsilon = upsilon;
        self
    }

    pub fn with_scaling(mut self, scaling: ScalingParams) -> Self {
        self.scaling = Some(scaling);
        self
    }

    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.extent >= 0.0 && self.extent.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "extent must be finite and non-negative, got {}",
                self.extent
            )));
        }
        if let TailModel::Moebius { alpha } = self.tail {
            if !(alpha > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "alpha must be positive, got {alpha}"
                )));
            }
        }
        if let Some(s) = self.scaling {
            if !(s.eta > 0.0) || !s.c.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "invalid scaling ({}, {})",
                    s.c, s.eta
                )));
            }
        }
        self.upsilon.validate()
    }

    /// Sorted panel boundaries inside `(lo, hi)` from all known kinks.
    pub(crate) fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .kinks
            .iter()
            .chain(self.w.kinks())
            .chain(self.upsilon.density.iter().flat_map(|d| d.kinks()))
            .copied()
            .filter(|&x| x > lo && x < hi)
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `∫_lo^hi f` with all kinks as panel boundaries.
    pub(crate) fn integrate<F: Fn(f64) -> f64>(
        &self,
        f: F,
        lo: f64,
        hi: f64,
        abs_tol: f64,
    ) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        let opts = QuadratureOptions {
            abs_tol,
            breakpoints: self.breakpoints(lo, hi),
            ..Default::default()
        };
        Ok(integrate_with(&f, lo, Upper::Finite(hi), &opts)?.value)
    }
}
