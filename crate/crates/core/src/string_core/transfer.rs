//! Unimodular transfer matrices. On an interval where `W ≡ w` the generator
//! `[[-zw, 1], [-(zw)², zw]]` squares to zero, so the transfer over length `ℓ`
//! is exactly `I + ℓ·A` and its inverse is `I - ℓ·A`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::model::Segment;
use crate::error::{Error, Result};
use crate::numerics::Jet;

pub type Matrix2 = [[Complex64; 2]; 2];

/// Scalars the propagation can run over: plain complex numbers or jets.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// Constant with the same shape as `self`.
    fn real(&self, x: f64) -> Self;
    fn scale(&self, x: f64) -> Self;
}

impl Scalar for Complex64 {
    fn real(&self, x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn scale(&self, x: f64) -> Self {
        self * x
    }
}

impl Scalar for Jet {
    fn real(&self, x: f64) -> Self {
        self.lift(Complex64::new(x, 0.0))
    }
    fn scale(&self, x: f64) -> Self {
        Jet::scale(self, Complex64::new(x, 0.0))
    }
}

fn check_finite(z: Complex64, xs: &[f64]) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() && xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("z = {z}, parameters {xs:?}")))
    }
}

pub fn interval_transfer(z: Complex64, w: f64, len: f64) -> Result<Matrix2> {
    check_finite(z, &[w, len])?;
    if len < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "interval length must be non-negative, got {len}"
        )));
    }
    let zw = z * w;
    let one = Complex64::new(1.0, 0.0);
    Ok([
        [one - zw * len, Complex64::new(len, 0.0)],
        [-zw * zw * len, one + zw * len],
    ])
}

pub fn mass_jump(z: Complex64, m: f64) -> Result<Matrix2> {
    check_finite(z, &[m])?;
    if !(m > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mass must be positive, got {m}"
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    Ok([[one, Complex64::new(0.0, 0.0)], [-z * z * m, one]])
}

pub fn det(m: &Matrix2) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn matmul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

#[inline]
pub(crate) fn step_forward<S: Scalar>(seg: &Segment, z: S, f: &mut S, f1: &mut S) {
    match *seg {
        Segment::Interval { w, len } => {
            let zw = z.scale(w);
            let u = *f1 - zw * *f;
            *f = *f + u.scale(len);
            *f1 = *f1 + (zw * u).scale(len);
        }
        Segment::Atom { mass } => {
            *f1 = *f1 - (z * z * *f).scale(mass);
        }
    }
}

#[inline]
pub(crate) fn step_backward<S: Scalar>(seg: &Segment, z: S, f: &mut S, f1: &mut S) {
    match *seg {
        Segment::Interval { w, len } => {
            let zw = z.scale(w);
            let u = *f1 - zw * *f;
            *f = *f - u.scale(len);
            *f1 = *f1 - (zw * u).scale(len);
        }
        Segment::Atom { mass } => {
            *f1 = *f1 + (z * z * *f).scale(mass);
        }
    }
}

/// Maps `(f, f^[1])` at `0-` to `R+`.
pub fn propagate_forward<S: Scalar>(segments: &[Segment], z: S, mut f: S, mut f1: S) -> (S, S) {
    for seg in segments {
        step_forward(seg, z, &mut f, &mut f1);
    }
    (f, f1)
}

/// Maps `(f, f^[1])` at `R+` back to `0-`.
pub fn propagate_backward<S: Scalar>(segments: &[Segment], z: S, mut f: S, mut f1: S) -> (S, S) {
    for seg in segments.iter().rev() {
        step_backward(seg, z, &mut f, &mut f1);
    }
    (f, f1)
}

/// Complex state with a separate power-of-two exponent, so that products of
/// many transfers neither overflow nor underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledState {
    pub f: Complex64,
    pub f1: Complex64,
    /// Natural logarithm of the common factor.
    pub log_scale: f64,
}

impl ScaledState {
    pub fn renormalize(&mut self) {
        let big = self.f.norm().max(self.f1.norm());
        if big == 0.0 || !big.is_finite() {
            return;
        }
        let e = big.log2().round();
        if e.abs() >= 64.0 {
            let factor = (-e).exp2();
            self.f *= factor;
            self.f1 *= factor;
            self.log_scale += e * std::f64::consts::LN_2;
        }
    }
}

/// Backward propagation with periodic renormalization.
pub fn propagate_backward_scaled(
    segments: &[Segment],
    z: Complex64,
    mut state: ScaledState,
) -> ScaledState {
    for seg in segments.iter().rev() {
        step_backward(seg, z, &mut state.f, &mut state.f1);
        if state.f.norm_sqr() > 1e200 || state.f1.norm_sqr() > 1e200 {
            state.renormalize();
        }
    }
    state.renormalize();
    state
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn transfer_at_zero_energy() {
        let t = interval_transfer(c(0.0, 0.0), 7.0, 2.5).unwrap();
        assert_eq!(t, [[c(1.0, 0.0), c(2.5, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
    }

    #[test]
    fn transfer_unit_example() {
        let t = interval_transfer(c(1.0, 0.0), 1.0, 1.0).unwrap();
        assert_eq!(t, [[c(0.0, 0.0), c(1.0, 0.0)], [c(-1.0, 0.0), c(2.0, 0.0)]]);
        assert_eq!(det(&t), c(1.0, 0.0));
    }

    #[test]
    fn mass_jump_examples() {
        assert_eq!(mass_jump(c(0.0, 1.0), 2.0).unwrap()[1][0], c(2.0, 0.0));
        assert_eq!(mass_jump(c(1.0, 0.0), 3.0).unwrap()[1][0], c(-3.0, 0.0));
        assert_eq!(mass_jump(c(0.0, 0.0), 3.0).unwrap()[1][0], c(0.0, 0.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(interval_transfer(c(f64::NAN, 0.0), 1.0, 1.0).is_err());
        assert!(interval_transfer(c(1.0, 0.0), 1.0, -1.0).is_err());
        assert!(mass_jump(c(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn step_matches_matrix() {
        let z = c(0.3, -1.2);
        let seg = Segment::Interval { w: -0.7, len: 1.3 };
        let t = interval_transfer(z, -0.7, 1.3).unwrap();
        let (f0, f10) = (c(0.2, 0.5), c(-1.0, 0.25));
        let (f, f1) = propagate_forward(&[seg], z, f0, f10);
        assert!((f - (t[0][0] * f0 + t[0][1] * f10)).norm() < 1e-14);
        assert!((f1 - (t[1][0] * f0 + t[1][1] * f10)).norm() < 1e-14);
        let (b, b1) = propagate_backward(&[seg], z, f, f1);
        assert!((b - f0).norm() < 1e-13 && (b1 - f10).norm() < 1e-13);
    }
}
