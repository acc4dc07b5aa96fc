//! Scattering data, Weyl-Titchmarsh functions and spectral sum rules for
//! generalized indefinite strings `-f'' = z ω f + z² υ f` whose normalized
//! anti-derivative is piecewise constant on `[0, R]` and equal to a linear
//! (`W(x) = x`) or Möbius (`W(x) = x/(1+2√α x)`) tail beyond `R`.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: Gauss-Kronrod quadrature, root bracketing, truncated series.
//! * [`string_core`]: models, transfer matrices, fundamental systems.
//! * [`scattering`]: Jost data, `a`, `b`, `m`, spectral density, bound states.
//! * [`trace`]: sum rules, Lieb-Thirring and absolutely-continuous bounds.
//! * [`approximation`]: reduction of general coefficients to exact models.
//! * [`transforms`]: Camassa-Holm and δ′-interaction reductions.

pub mod approximation;
pub mod error;
pub mod io;
pub mod numerics;
pub mod scattering;
pub mod string_core;
pub mod trace;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
