//! Truncated Taylor series with complex coefficients.
//!
//! A [`Jet`] of order `n` stores the first `n + 1` Taylor coefficients of an
//! analytic function around a base point. Arithmetic is performed in the ring
//! of polynomials modulo `t^(n+1)`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// Largest order a jet can carry.
pub const MAX_JET_ORDER: usize = 7;

const CAP: usize = MAX_JET_ORDER + 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    base: Complex64,
    order: usize,
    coeffs: [Complex64; CAP],
}

impl Jet {
    pub fn constant(base: Complex64, order: usize, value: Complex64) -> Self {
        assert!(
            order <= MAX_JET_ORDER,
            "jet order {order} exceeds {MAX_JET_ORDER}"
        );
        let mut coeffs = [Complex64::new(0.0, 0.0); CAP];
        coeffs[0] = value;
        Self {
            base,
            order,
            coeffs,
        }
    }

    /// The identity function `t ↦ base + t`.
    pub fn variable(base: Complex64, order: usize) -> Self {
        let mut jet = Self::constant(base, order, base);
        if order >= 1 {
            jet.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        jet
    }

    pub fn from_coeffs(base: Complex64, coeffs: &[Complex64]) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        let mut jet = Self::constant(base, coeffs.len() - 1, coeffs[0]);
        jet.coeffs[..coeffs.len()].copy_from_slice(coeffs);
        jet
    }

    pub fn base(&self) -> Complex64 {
        self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs[..=self.order]
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        if n <= self.order {
            self.coeffs[n]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// `n`-th derivative at the base point, i.e. `n! · coeff(n)`.
    pub fn derivative(&self, n: usize) -> Complex64 {
        let factorial: f64 = (1..=n).map(|i| i as f64).product();
        self.coeff(n) * factorial
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// A constant with the same base and order as `self`.
    pub fn lift(&self, value: Complex64) -> Self {
        Self::constant(self.base, self.order, value)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = *self;
        for c in out.coeffs[..=self.order].iter_mut() {
            *c *= factor;
        }
        out
    }

    /// Drops the order by one.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order);
        let mut out = *self;
        out.order = order;
        for c in out.coeffs[order + 1..].iter_mut() {
            *c = Complex64::new(0.0, 0.0);
        }
        out
    }

    /// Divides by the local variable `t`, assuming the constant coefficient
    /// vanishes. The result has order one less than `self`.
    pub fn div_by_variable(&self) -> Self {
        assert!(self.order >= 1, "cannot divide an order-0 jet by t");
        let mut out = Self::constant(self.base, self.order - 1, self.coeffs[1]);
        for n in 1..self.order {
            out.coeffs[n] = self.coeffs[n + 1];
        }
        out
    }

    /// Multiplicative inverse; requires a non-zero constant coefficient.
    pub fn recip(&self) -> Self {
        let c0 = self.coeffs[0];
        assert!(
            c0.norm() > 0.0,
            "jet with zero constant term is not invertible"
        );
        let mut out = self.lift(c0.inv());
        for n in 1..=self.order {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=n {
                acc += self.coeffs[j] * out.coeffs[n - j];
            }
            out.coeffs[n] = -acc / c0;
        }
        out
    }

    pub fn div(&self, rhs: &Self) -> Self {
        *self * rhs.recip()
    }

    /// `exp` of a jet, via the recurrence `n·e_n = Σ k·a_k·e_{n-k}`.
    pub fn exp(&self) -> Self {
        let mut out = self.lift(self.coeffs[0].exp());
        for n in 1..=self.order {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 1..=n {
                acc += self.coeffs[k] * out.coeffs[n - k] * k as f64;
            }
            out.coeffs[n] = acc / n as f64;
        }
        out
    }

    fn check_compatible(&self, rhs: &Self) {
        debug_assert_eq!(self.order, rhs.order, "jet orders differ");
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        self.check_compatible(&rhs);
        for n in 0..=self.order {
            self.coeffs[n] += rhs.coeffs[n];
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        self.check_compatible(&rhs);
        for n in 0..=self.order {
            self.coeffs[n] -= rhs.coeffs[n];
        }
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for n in 0..=self.order {
            self.coeffs[n] = -self.coeffs[n];
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.check_compatible(&rhs);
        let mut out = self.lift(Complex64::new(0.0, 0.0));
        for n in 0..=self.order {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..=n {
                acc += self.coeffs[j] * rhs.coeffs[n - j];
            }
            out.coeffs[n] = acc;
        }
        out
    }
}
