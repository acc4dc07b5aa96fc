//! JSON schemas for models, measures and coefficient bundles.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::approximation::{GeneralCoefficients, GeneralMeasure, RealFunction};
use crate::error::{Error, Result};
use crate::string_core::{ScalingParams, StringModel, TailModel};

/// Parses and validates a model.
pub fn model_from_json(text: &str) -> Result<StringModel> {
    let model: StringModel = serde_json::from_str(text)
        .map_err(|e| Error::InvalidModel(vec![format!("malformed model JSON: {e}")]))?;
    model.validate()?;
    Ok(model)
}

pub fn model_to_json(model: &StringModel) -> String {
    serde_json::to_string_pretty(model).expect("models always serialize")
}

/// Reads a model file. I/O failures come back as `std::io::Error`.
pub fn read_model(path: &Path) -> std::io::Result<Result<StringModel>> {
    Ok(model_from_json(&fs::read_to_string(path)?))
}

/// Sampled function `x ↦ values`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleTable {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampleTable {
    pub fn to_function(&self) -> Result<RealFunction> {
        RealFunction::sampled(self.x.clone(), self.values.clone())
    }

    pub fn sample(f: &RealFunction, grid: &[f64]) -> Self {
        Self {
            x: grid.to_vec(),
            values: grid.iter().map(|&x| f.eval(x)).collect(),
        }
    }
}

/// JSON form of a general measure: atoms as `[position, mass]` pairs and an
/// optional sampled density.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasureSpec {
    #[serde(default)]
    pub atoms: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<SampleTable>,
}

impl MeasureSpec {
    pub fn to_measure(&self) -> Result<GeneralMeasure> {
        let m = GeneralMeasure {
            density: self
                .density
                .as_ref()
                .map(SampleTable::to_function)
                .transpose()?,
            atoms: self.atoms.iter().map(|a| (a[0], a[1])).collect(),
        };
        m.validate()?;
        Ok(m)
    }

    /// Closed-form densities are sampled on `grid`.
    pub fn from_measure(m: &GeneralMeasure, grid: &[f64]) -> Self {
        Self {
            atoms: m.atoms.iter().map(|&(x, w)| [x, w]).collect(),
            density: m.density.as_ref().map(|d| match d {
                RealFunction::Sampled(p) => SampleTable {
                    x: p.xs().to_vec(),
                    values: p.ys().to_vec(),
                },
                RealFunction::Closed(_) => SampleTable::sample(d, grid),
            }),
        }
    }
}

/// Everything of a [`GeneralCoefficients`] except the samples of `W`,
/// which travel as a CSV table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientMeta {
    pub tail: TailModel,
    pub extent: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingParams>,
    #[serde(default)]
    pub kinks: Vec<f64>,
    #[serde(default)]
    pub measure: MeasureSpec,
}

impl CoefficientMeta {
    pub fn of(general: &GeneralCoefficients, grid: &[f64]) -> Self {
        Self {
            tail: general.tail,
            extent: general.extent,
            scaling: general.scaling,
            kinks: general.kinks.clone(),
            measure: MeasureSpec::from_measure(&general.upsilon, grid),
        }
    }

    pub fn with_samples(&self, w: SampleTable) -> Result<GeneralCoefficients> {
        let mut g = GeneralCoefficients::new(w.to_function()?, self.extent, self.tail)
            .with_measure(self.measure.to_measure()?)
            .with_kinks(self.kinks.clone());
        g.scaling = self.scaling;
        g.validate()?;
        Ok(g)
    }
}
