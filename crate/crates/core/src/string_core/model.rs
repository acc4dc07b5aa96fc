use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise constant `W` on `[0, R]`: `values[j]` holds on
/// `[breakpoints[j], breakpoints[j + 1])`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StepFunction {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        Self {
            breakpoints,
            values,
        }
    }

    /// Empty step part (`R = 0`).
    pub fn empty() -> Self {
        Self {
            breakpoints: vec![0.0],
            values: Vec::new(),
        }
    }

    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (w[0], w[1], v))
    }
}

/// Finite discrete measure `υ`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub positions: Vec<f64>,
    pub masses: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(positions: Vec<f64>, masses: Vec<f64>) -> Self {
        Self { positions, masses }
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.positions
            .iter()
            .copied()
            .zip(self.masses.iter().copied())
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TailModel {
    /// `W(x) = x` beyond `R`.
    Linear,
    /// `W(x) = x / (1 + 2√α x)` beyond `R`.
    Moebius { alpha: f64 },
}

impl TailModel {
    pub fn alpha(&self) -> Option<f64> {
        match *self {
            TailModel::Linear => None,
            TailModel::Moebius { alpha } => Some(alpha),
        }
    }

    /// Lower edge of the essential spectrum of the normalized string.
    pub fn edge(&self) -> f64 {
        self.alpha().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            TailModel::Linear => x,
            TailModel::Moebius { alpha } => x / (1.0 + 2.0 * alpha.sqrt() * x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub c: f64,
    pub eta: f64,
}

impl Default for ScalingParams {
    fn default() -> Self {
        Self { c: 0.0, eta: 1.0 }
    }
}

impl ScalingParams {
    pub fn is_identity(&self) -> bool {
        self.c == 0.0 && self.eta == 1.0
    }
}

/// A string of the exactly solvable class, stored in normalized form: the
/// scaling `(c, η)` is applied only to `m` and to the spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StringModel {
    pub tail: TailModel,
    #[serde(rename = "R")]
    pub r: f64,
    pub step: StepFunction,
    #[serde(default)]
    pub upsilon: DiscreteMeasure,
    #[serde(default)]
    pub scaling: ScalingParams,
}

impl StringModel {
    pub fn new(tail: TailModel, step: StepFunction, upsilon: DiscreteMeasure) -> Self {
        let r = step.breakpoints.last().copied().unwrap_or(0.0);
        Self {
            tail,
            r,
            step,
            upsilon,
            scaling: ScalingParams::default(),
        }
    }

    /// The unperturbed model (`R = 0`).
    pub fn free(tail: TailModel) -> Self {
        Self::new(tail, StepFunction::empty(), DiscreteMeasure::default())
    }

    pub fn with_scaling(mut self, scaling: ScalingParams) -> Self {
        self.scaling = scaling;
        self
    }

    /// Same string without the `(c, η)` scaling.
    pub fn normalized(&self) -> Self {
        Self {
            scaling: ScalingParams::default(),
            ..self.clone()
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        self.tail.alpha()
    }

    /// Normalized `W` at `x` (left-continuous step convention, tail beyond `R`).
    pub fn w(&self, x: f64) -> f64 {
        if x >= self.r {
            return self.tail.eval(x);
        }
        for (a, b, v) in self.step.intervals() {
            if x >= a && x < b {
                return v;
            }
        }
        self.tail.eval(x)
    }

    pub fn validate(&self) -> Result<()> {
        let v = validate_model(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidModel(v))
        }
    }

    /// Ordered propagation sequence from `0` to `R+`.
    pub fn segments(&self) -> Vec<Segment> {
        let atoms: Vec<(f64, f64)> = self.upsilon.atoms().collect();
        let mut out = Vec::with_capacity(self.step.values.len() + 2 * atoms.len());
        let mut next = 0;
        while next < atoms.len() && atoms[next].0 <= 0.0 {
            out.push(Segment::Atom {
                mass: atoms[next].1,
            });
            next += 1;
        }
        for (x0, x1, w) in self.step.intervals() {
            let mut pos = x0;
            while next < atoms.len() && atoms[next].0 <= x1 {
                let (s, m) = atoms[next];
                if s > pos {
                    out.push(Segment::Interval { w, len: s - pos });
                    pos = s;
                }
                out.push(Segment::Atom { mass: m });
                next += 1;
            }
            if x1 > pos {
                out.push(Segment::Interval { w, len: x1 - pos });
            }
        }
        // Atoms are validated to lie in [0, R]; anything left sits at R.
        for &(_, m) in &atoms[next..] {
            out.push(Segment::Atom { mass: m });
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Interval { w: f64, len: f64 },
    Atom { mass: f64 },
}

/// Solution value pair `(f, f^[1])` at a position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub position: f64,
    pub f: Complex64,
    pub f1: Complex64,
}

/// Lists every violated invariant; an empty list means the model is valid.
pub fn validate_model(model: &StringModel) -> Vec<String> {
    let mut v = Vec::new();
    let r = model.r;
    if !r.is_finite() || r < 0.0 {
        v.push(format!("R must be finite and non-negative, got {r}"));
    }
    let bp = &model.step.breakpoints;
    let vals = &model.step.values;
    if bp.is_empty() {
        if r != 0.0 {
            v.push("empty breakpoint list requires R = 0".into());
        }
        if !vals.is_empty() {
            v.push("values given without breakpoints".into());
        }
    } else {
        if bp[0] != 0.0 {
            v.push(format!("first breakpoint must be 0, got {}", bp[0]));
        }
        if *bp.last().unwrap() != r {
            v.push(format!(
                "last breakpoint {} differs from R = {r}",
                bp.last().unwrap()
            ));
        }
        if bp.iter().any(|x| !x.is_finite()) {
            v.push("non-finite breakpoint".into());
        }
        if bp.windows(2).any(|w| !(w[1] > w[0])) {
            v.push("breakpoints not strictly increasing".into());
        }
        if vals.len() + 1 != bp.len() {
            v.push(format!(
                "{} values for {} breakpoints",
                vals.len(),
                bp.len()
            ));
        }
    }
    if vals.iter().any(|x| !x.is_finite()) {
        v.push("non-finite step value".into());
    }
    let up = &model.upsilon;
    if up.positions.len() != up.masses.len() {
        v.push(format!(
            "{} atom positions but {} masses",
            up.positions.len(),
            up.masses.len()
        ));
    }
    if up.positions.iter().any(|x| !x.is_finite()) {
        v.push("non-finite atom position".into());
    }
    if up.positions.windows(2).any(|w| !(w[1] > w[0])) {
        v.push("atom positions not strictly increasing".into());
    }
    if up.positions.iter().any(|&x| x < 0.0) {
        v.push("negative atom position".into());
    }
    if up.positions.iter().any(|&x| x > r) {
        v.push("atom position beyond R".into());
    }
    if up.masses.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
        v.push("non-positive mass".into());
    }
    if let TailModel::Moebius { alpha } = model.tail {
        if !(alpha > 0.0 && alpha.is_finite()) {
            v.push(format!("Moebius tail needs alpha > 0, got {alpha}"));
        }
    }
    let s = model.scaling;
    if !s.c.is_finite() {
        v.push("non-finite scaling offset c".into());
    }
    if !(s.eta > 0.0 && s.eta.is_finite()) {
        v.push(format!(
            "eta must be positive (reflected spectra are not supported), got {}",
            s.eta
        ));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> StringModel {
        StringModel::new(
            TailModel::Linear,
            StepFunction::new(vec![0.0, 1.0, 2.0], vec![0.5, -0.3]),
            DiscreteMeasure::new(vec![0.5], vec![2.0]),
        )
    }

    #[test]
    fn valid_model_has_no_violations() {
        assert!(validate_model(&sample()).is_empty());
    }

    #[test]
    fn atom_beyond_r() {
        let mut m = sample();
        m.upsilon = DiscreteMeasure::new(vec![2.5], vec![1.0]);
        assert_eq!(
            validate_model(&m),
            vec!["atom position beyond R".to_string()]
        );
    }

    #[test]
    fn negative_mass() {
        let mut m = sample();
        m.upsilon.masses[0] = -1.0;
        assert_eq!(validate_model(&m), vec!["non-positive mass".to_string()]);
    }

    #[test]
    fn negative_eta_rejected() {
        let m = sample().with_scaling(ScalingParams { c: 0.0, eta: -1.0 });
        assert_eq!(validate_model(&m).len(), 1);
    }

    #[test]
    fn atoms_at_breakpoints_follow_the_left_interval() {
        let m = StringModel::new(
            TailModel::Linear,
            StepFunction::new(vec![0.0, 1.0, 2.0], vec![3.0, 4.0]),
            DiscreteMeasure::new(vec![0.0, 1.0, 1.5, 2.0], vec![1.0, 2.0, 3.0, 4.0]),
        );
        use Segment::*;
        assert_eq!(
            m.segments(),
            vec![
                Atom { mass: 1.0 },
                Interval { w: 3.0, len: 1.0 },
                Atom { mass: 2.0 },
                Interval { w: 4.0, len: 0.5 },
                Atom { mass: 3.0 },
                Interval { w: 4.0, len: 0.5 },
                Atom { mass: 4.0 },
            ]
        );
    }

    #[test]
    fn json_schema_round_trip() {
        let m = sample().with_scaling(ScalingParams { c: 1.0, eta: 2.0 });
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"R\":2.0") && s.contains("\"kind\":\"linear\""));
        let back: StringModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let moeb: StringModel = serde_json::from_str(
            r#"{"tail":{"kind":"moebius","alpha":0.25},"R":0,"step":{"breakpoints":[0],"values":[]},
                "upsilon":{"positions":[],"masses":[]},"scaling":{"c":0,"eta":1}}"#,
        )
        .unwrap();
        assert_eq!(moeb.tail, TailModel::Moebius { alpha: 0.25 });
    }
}
