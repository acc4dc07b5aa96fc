//! Quadrature, root finding and truncated series shared by the other modules.

pub mod quadrature;
pub mod roots;
pub mod series;

pub use quadrature::{
    adaptive_integrate, gauss_kronrod, integrate_even_real_line, integrate_panels,
    QuadratureOptions, QuadratureResult, Upper,
};
pub use roots::{
    bracket_roots, refine_root, scan_points, Dip, DipCriterion, RootRecord, ScanResult,
};
pub use series::{Jet, MAX_JET_ORDER};
