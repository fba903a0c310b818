//! Worked examples that span several modules.

use orbitkit::intertwiner::{delta_audit, orbit_intertwiner, projection_intertwiner};
use orbitkit::invariants::example_pair_generator;
use orbitkit::linalg::{operator_norm, CMatrix, HermitianOperator, C64};
use orbitkit::sampling::{exp_i, Sampler};
use orbitkit::Tolerances;

#[test]
fn six_dimensional_orbit_pair() {
    let tol = Tolerances::default();
    let rho = HermitianOperator::from_real_diag(&[0.7, 0.7, 0.3, 0.0, 0.0, 0.0]);
    let mut s = Sampler::new(11);
    let h = s.hermitian(6);
    // u = exp(A) with A = i·0.05·H/‖H‖ anti-Hermitian, ‖A‖ = 0.05.
    let u = exp_i(&h, 0.05, &tol).unwrap();
    let rho_p = rho.conjugate(&u);

    let c = orbit_intertwiner(&rho, &rho_p, 0.4, &tol).unwrap();
    assert!(c.bound_ok);
    assert!(c.conjugation_residual <= 1e-9);
    assert!(c.op_norm_dev < 0.4);
    assert!(c.chain.holds());

    let audit = delta_audit(&rho, &rho_p, &tol).unwrap();
    assert_eq!(audit.delta_j.len(), 2);
    assert!(audit.delta <= audit.sum() + 1e-15);
    // The constructed unitary need not be u, but it is as good up to the bound.
    let dev_u = operator_norm(&(&u - &CMatrix::identity(6)), &tol).unwrap();
    assert!(dev_u <= 0.05 + 1e-12);
}

#[test]
fn rank_two_example_pair_intertwiner() {
    let tol = Tolerances::default();
    let alpha = [C64::new(0.1f64.cos(), 0.0), C64::new(0.15f64.cos(), 0.0)];
    let pair = example_pair_generator(5, &alpha, Some(3)).unwrap();
    let c = projection_intertwiner(&pair.e, &pair.f, 0.6, &tol).unwrap();

    let inside = 2.0 - pair.e.overlap(&pair.f);
    let outside = pair.e.complement().rank() as f64 - pair.e.complement().overlap(&pair.f.complement());
    let mid = 2.0 * (inside + outside);
    assert!(c.op_norm_dev <= c.hs_norm_dev + 1e-15);
    assert!(c.hs_norm_dev.powi(2) <= mid + 1e-12);
    assert!(mid < 0.36);
    assert!(c.bound_ok);
    assert!(c.conjugation_residual <= 1e-12);
}

#[test]
fn closed_form_example_with_two_angles() {
    let tol = Tolerances::default();
    let (a, b) = ((std::f64::consts::PI / 6.0).cos(), (std::f64::consts::PI / 4.0).cos());
    let pair = example_pair_generator(4, &[C64::new(a, 0.0), C64::new(b, 0.0)], None).unwrap();
    let m = pair.measured(&tol).unwrap();
    let mut spec = m.efe_spectrum.clone();
    spec.sort_by(f64::total_cmp);
    assert!((spec[0] - 0.5).abs() < 1e-12 && (spec[1] - 0.75).abs() < 1e-12);
    assert!((m.hs_sq - 1.5).abs() < 1e-12);
    assert!((m.op_norm - 0.5f64.sqrt()).abs() < 1e-12);
}
