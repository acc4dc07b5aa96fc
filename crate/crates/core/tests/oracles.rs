//! Frozen reference values. Analytic where a closed form exists, otherwise
//! regression values recorded from a cross-checked run.

use approx::assert_relative_eq;
use gis_spectra::numerics::{adaptive_integrate, refine_root, Upper};
use gis_spectra::scattering::{bound_states, scattering_ab, spectral_density, weyl_m};
use gis_spectra::string_core::{DiscreteMeasure, StepFunction, StringModel, TailModel};
use gis_spectra::trace::{jensen_mu_lower, perturbation_norms, verify_trace_f0, F_function};
use gis_spectra::Complex64;

fn two_step(tail: TailModel) -> StringModel {
    StringModel::new(
        tail,
        StepFunction::new(vec![0.0, 0.5, 1.5], vec![-1.0, 3.0]),
        DiscreteMeasure::new(vec![0.25, 1.5], vec![1.0, 0.5]),
    )
}

#[test]
fn two_step_norm_is_exact() {
    // ∫₀^½ (1+x)² + ∫_½^{3/2} (3−x)² + 1.5 = 19/24 + 49/12 + 3/2
    let n = perturbation_norms(&two_step(TailModel::Linear)).unwrap();
    assert_eq!(n.n0, 6.375);
}

#[test]
fn two_step_linear_regression() {
    let m = two_step(TailModel::Linear);
    let w = weyl_m(&m, Complex64::i()).unwrap();
    assert_relative_eq!(w.re, -4.660993880311324e-1, max_relative = 1e-10);
    assert_relative_eq!(w.im, 1.831620632188964, max_relative = 1e-10);
    let bs = bound_states(&m, None, 1e-14).unwrap();
    let kappas = [0.9249275059006539, 1.237180337568017, 2.6520662083834043];
    assert_eq!(bs.kappas.len(), kappas.len());
    for (k, want) in bs.kappas.iter().zip(kappas) {
        assert_relative_eq!(*k, want, max_relative = 1e-10);
    }
    assert_eq!(bs.eigenvalues.len(), 2);
    assert_relative_eq!(bs.eigenvalues[0], -2.6431078368640732, max_relative = 1e-10);
    assert_relative_eq!(bs.eigenvalues[1], -0.9204227143561815, max_relative = 1e-10);
    assert_relative_eq!(
        spectral_density(&m, 3.0).unwrap().rho,
        1.532466853723982e-1,
        max_relative = 1e-10
    );
    let (a, b) = scattering_ab(&m, Complex64::new(1.5, 0.0)).unwrap();
    assert_relative_eq!(a.re, 5.507234009918311, max_relative = 1e-10);
    assert_relative_eq!(b.im, -2.1431364817696203, max_relative = 1e-10);
}

#[test]
fn two_step_moebius_regression() {
    let m = two_step(TailModel::Moebius { alpha: 1.0 });
    let n = perturbation_norms(&m).unwrap();
    assert_relative_eq!(n.a1, 2.0965735902799727, max_relative = 1e-12);
    assert_relative_eq!(n.a2, 25.860786795139987, max_relative = 1e-12);
    let bs = bound_states(&m, None, 1e-14).unwrap();
    let eig = [-2.6418436802034893, -0.2857416356781277, 0.617903722323923];
    assert_eq!(bs.eigenvalues.len(), 3);
    for (e, want) in bs.eigenvalues.iter().zip(eig) {
        assert_relative_eq!(*e, want, max_relative = 1e-10);
    }
    assert_relative_eq!(
        spectral_density(&m, 3.0).unwrap().rho,
        7.302165149836499e-3,
        max_relative = 1e-9
    );
}

#[test]
fn point_mass_scattering() {
    let m = StringModel::new(
        TailModel::Linear,
        StepFunction::empty(),
        DiscreteMeasure::new(vec![0.0], vec![2.0]),
    );
    for k in [0.1, 0.7, 2.0, 9.0] {
        let (a, _) = scattering_ab(&m, Complex64::new(k, 0.0)).unwrap();
        assert_relative_eq!(a.re, 1.0, max_relative = 1e-12);
        assert_relative_eq!(a.im, -k * k * k, max_relative = 1e-12);
    }
    let r = verify_trace_f0(&m, 1e-9).unwrap();
    assert_relative_eq!(r.boundstate_term, 4.0 / 3.0, max_relative = 1e-12);
    assert!((r.log_integral_term - 2.0 / 3.0).abs() < 1e-9);
}

#[test]
fn step_eigenvalue_is_quadratic_root() {
    let m = StringModel::new(
        TailModel::Linear,
        StepFunction::new(vec![0.0, 1.0], vec![2.0]),
        DiscreteMeasure::default(),
    );
    let bs = bound_states(&m, None, 1e-14).unwrap();
    assert_eq!(bs.eigenvalues.len(), 1);
    assert_relative_eq!(
        bs.eigenvalues[0],
        -(3.0 + 5f64.sqrt()) / 2.0,
        max_relative = 1e-12
    );
}

#[test]
fn scaled_free_model() {
    // m(z) = η·m̃(ηz) + c with m̃(ζ) = i/√ζ.
    let m = StringModel::free(TailModel::Linear)
        .with_scaling(gis_spectra::string_core::ScalingParams { c: 0.5, eta: 4.0 });
    let w = weyl_m(&m, Complex64::new(-1.0, 0.0)).unwrap();
    assert_relative_eq!(w.re, 4.0 * 0.5 + 0.5, max_relative = 1e-14);
}

#[test]
fn special_values() {
    assert!((F_function(2.0).unwrap() - 1.123_609_93).abs() < 1e-8);
    let d = jensen_mu_lower(1.0, 2.0, 0.0, TailModel::Linear).unwrap();
    assert!((d - 0.034_295_1).abs() < 1e-6);
    let r = adaptive_integrate(
        |k: f64| k.powi(6).ln_1p() / k.powi(4),
        0.0,
        Upper::Infinity,
        1e-10,
    )
    .unwrap();
    assert!((r.value - std::f64::consts::PI / 3.0).abs() < 1e-8);
    let phi = refine_root(|x: f64| x * x - x - 1.0, (1.0, 2.0), 1e-15).unwrap();
    assert_relative_eq!(
        phi.location,
        (1.0 + 5f64.sqrt()) / 2.0,
        max_relative = 1e-15
    );
}
