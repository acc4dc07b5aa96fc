use serde::{Deserialize, Serialize};

use crate::approximation::{
    condition_integrals, GeneralCoefficients, PiecewiseLinear, RealFunction,
};
use crate::error::{Error, Result};
use crate::string_core::{ScalingParams, TailModel};

/// Samples `(x, V(x))` of the distribution function of a general singular `ν`,
/// interpolated linearly and constant beyond the last sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSamples {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

/// The interaction measure `ν`: atoms `strengths[j]·δ_{positions[j]}`, plus an
/// optional sampled distribution function. Singularity of the sampled part
/// cannot be checked from samples and is taken on trust.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DeltaPrimeData {
    pub positions: Vec<f64>,
    pub strengths: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<DistributionSamples>,
}

impl DeltaPrimeData {
    pub fn new(positions: Vec<f64>, strengths: Vec<f64>) -> Self {
        Self {
            positions,
            strengths,
            distribution: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.positions.len() != self.strengths.len() {
            return Err(Error::InvalidArgument(format!(
                "{} positions for {} strengths",
                self.positions.len(),
                self.strengths.len()
            )));
        }
        if self.positions.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidArgument(
                "positions must be positive and finite".into(),
            ));
        }
        if self.positions.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "positions must be strictly increasing".into(),
            ));
        }
        if self.strengths.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite("strength".into()));
        }
        if let Some(d) = &self.distribution {
            self.sampled(d)?;
            if d.x[0] < 0.0 || d.v[0] != 0.0 {
                return Err(Error::InvalidArgument(
                    "distribution samples must start with V = 0 at x ≥ 0".into(),
                ));
            }
        }
        Ok(())
    }

    fn sampled(&self, d: &DistributionSamples) -> Result<PiecewiseLinear> {
        PiecewiseLinear::new(d.x.clone(), d.v.clone())
    }

    /// Left-continuous distribution function `V(x) = ν([0, x))`.
    pub fn distribution_function(&self, x: f64) -> f64 {
        let k = self.positions.partition_point(|&s| s < x);
        let atoms: f64 = self.strengths[..k].iter().sum();
        let sampled = self
            .distribution
            .as_ref()
            .and_then(|d| self.sampled(d).ok())
            .map_or(0.0, |p| if x <= p.xs()[0] { 0.0 } else { p.eval(x) });
        atoms + sampled
    }

    /// Eventual value of `V`.
    pub fn total(&self) -> f64 {
        self.strengths.iter().sum::<f64>()
            + self
                .distribution
                .as_ref()
                .map_or(0.0, |d| *d.v.last().unwrap())
    }

    fn support_end(&self) -> f64 {
        let a = self.positions.last().copied().unwrap_or(0.0);
        let d = self
            .distribution
            .as_ref()
            .map_or(0.0, |d| *d.x.last().unwrap());
        a.max(d)
    }

    /// `∫₀^∞ |V − v0|²` in closed form; infinite unless `V` settles at `v0`.
    pub fn square_distance(&self, v0: f64) -> f64 {
        if self.total() != v0 {
            return f64::INFINITY;
        }
        let mut pts: Vec<f64> = vec![0.0];
        pts.extend(&self.positions);
        if let Some(d) = &self.distribution {
            pts.extend(d.x.iter().filter(|&&x| x > 0.0));
        }
        pts.push(self.support_end());
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        // V − v0 is linear on each piece; integrate the square exactly.
        pts.windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                // Right limit at the left end, where an atom may sit.
                let ya = self.distribution_function(next_up(a)) - v0;
                let yb = self.distribution_function(b) - v0;
                (b - a) * (ya * ya + ya * yb + yb * yb) / 3.0
            })
            .sum()
    }
}

fn next_up(x: f64) -> f64 {
    f64::from_bits(if x == 0.0 { 1 } else { x.to_bits() + 1 })
}

/// Maps `ν` to string coefficients `W(x) = x + V(x)` with the linear tail and
/// the scaling `c = ν([0, ∞))`, `η = 1`.
pub fn delta_prime_to_string(data: &DeltaPrimeData) -> Result<GeneralCoefficients> {
    data.validate()?;
    let extent = 2.0 * data.support_end() + 1.0;
    let mut kinks = data.positions.clone();
    if let Some(d) = &data.distribution {
        kinks.extend(&d.x);
    }
    let d = data.clone();
    Ok(GeneralCoefficients::new(
        RealFunction::closed(move |x| x + d.distribution_function(x)),
        extent,
        TailModel::Linear,
    )
    .with_scaling(ScalingParams {
        c: data.total(),
        eta: 1.0,
    })
    .with_kinks(kinks))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaPrimeLt {
    /// `Σ |λ|^{-3/2}` over the negative eigenvalues.
    pub lhs: f64,
    /// `(3/4) ∫ |V − V0|²`.
    pub rhs: f64,
    pub v0: f64,
    pub holds: bool,
    /// `|(3/4)·n0 − rhs|` with `n0` the string perturbation norm by quadrature;
    /// only meaningful when `v0` equals the fitted constant.
    pub consistency_residual: f64,
}

/// Lieb-Thirring type bound for δ′ interactions. `v0` defaults to `ν([0, ∞))`.
pub fn delta_prime_lt_check(
    data: &DeltaPrimeData,
    eigenvalues: &[f64],
    v0: Option<f64>,
) -> Result<DeltaPrimeLt> {
    data.validate()?;
    let v0 = v0.unwrap_or_else(|| data.total());
    let lhs = eigenvalues
        .iter()
        .filter(|&&l| l < 0.0)
        .fold(0.0, |acc, l| acc + l.abs().powf(-1.5));
    let rhs = 0.75 * data.square_distance(v0);
    let n0 = condition_integrals(&delta_prime_to_string(data)?)?.norm;
    Ok(DeltaPrimeLt {
        lhs,
        rhs,
        v0,
        holds: lhs <= rhs + 1e-12 * rhs.abs().max(1.0),
        consistency_residual: (0.75 * n0 - rhs).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_atom_at_one() {
        let d = DeltaPrimeData::new(vec![1.0], vec![2.0]);
        let g = delta_prime_to_string(&d).unwrap();
        for x in [0.0, 0.5, 0.999, 1.0, 1.0 + 1e-9, 2.5] {
            let want = x + if x > 1.0 { 2.0 } else { 0.0 };
            assert_eq!(g.w.eval(x), want);
        }
        assert_eq!(g.scaling.unwrap().c, 2.0);
        assert_eq!(d.square_distance(2.0), 4.0);
        assert!(d.square_distance(0.0).is_infinite());
    }

    #[test]
    fn signed_pair() {
        let d = DeltaPrimeData::new(vec![1.0, 2.0], vec![1.0, -1.0]);
        assert_eq!(d.distribution_function(1.5), 1.0);
        assert_eq!(d.distribution_function(2.0), 1.0);
        assert_eq!(d.distribution_function(2.5), 0.0);
        assert_eq!(d.total(), 0.0);
        assert_eq!(d.square_distance(0.0), 1.0);
    }

    #[test]
    fn empty_measure() {
        let d = DeltaPrimeData::default();
        let r = delta_prime_lt_check(&d, &[], None).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.holds);
    }

    #[test]
    fn rejects_atom_at_zero() {
        assert!(DeltaPrimeData::new(vec![0.0], vec![1.0])
            .validate()
            .is_err());
    }

    #[test]
    fn sampled_distribution() {
        let mut d = DeltaPrimeData::default();
        d.distribution = Some(DistributionSamples {
            x: vec![0.0, 1.0, 2.0],
            v: vec![0.0, 1.0, 1.0],
        });
        assert_eq!(d.total(), 1.0);
        // ∫₀¹ (x − 1)² = 1/3
        assert!((d.square_distance(1.0) - 1.0 / 3.0).abs() < 1e-15);
    }
}
