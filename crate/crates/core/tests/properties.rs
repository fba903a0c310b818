//! Randomised invariants and an independent eigensolver oracle.

use nalgebra::{Complex, DMatrix};
use orbitkit::intertwiner::orbit_intertwiner;
use orbitkit::invariants::{moment_signature, same_orbit};
use orbitkit::linalg::{eigh, CMatrix, HermitianOperator};
use orbitkit::sampling::Sampler;
use orbitkit::spectral::{decompose, lagrange_projector, reconstruct};
use orbitkit::suite::{orbit_outcome, OrbitInstance, Outcome, ORBIT_EPSILON};
use orbitkit::Tolerances;
use proptest::prelude::*;

fn to_nalgebra(m: &CMatrix) -> DMatrix<Complex<f64>> {
    let d = m.dim();
    DMatrix::from_fn(d, d, |i, j| Complex::new(m[(i, j)].re, m[(i, j)].im))
}

#[test]
fn eigenvalues_match_nalgebra() {
    let tol = Tolerances::default();
    for seed in 0..40u64 {
        let mut s = Sampler::new(seed);
        let d = s.int_in(1, 24);
        let a = s.hermitian(d);
        let ours = eigh(&a, &tol).unwrap();
        let mut theirs: Vec<f64> = to_nalgebra(a.matrix()).symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(|x, y| y.total_cmp(x));
        let scale = a.matrix().frobenius_norm().max(1.0);
        for (x, y) in ours.values.iter().zip(&theirs) {
            assert!((x - y).abs() <= 1e-12 * scale, "seed {seed}: {x} vs {y}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigh_reconstructs_and_is_orthonormal(seed in any::<u64>(), d in 1usize..16) {
        let tol = Tolerances::default();
        let a = Sampler::new(seed).hermitian(d);
        let e = eigh(&a, &tol).unwrap();
        let scale = a.matrix().max_abs();
        prop_assert!(e.reconstruct().distance(a.matrix()) <= 1e-10 * scale + 1e-14);
        for w in e.values.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        let v = CMatrix::from_fn(d, |i, j| e.vectors[j][i]);
        prop_assert!((&v.adjoint() * &v).distance(&CMatrix::identity(d)) <= tol.ortho_tol);
    }

    #[test]
    fn decomposition_round_trips_and_interpolates(seed in any::<u64>(), d in 3usize..12) {
        let tol = Tolerances::default();
        let mut s = Sampler::new(seed);
        let r1 = s.int_in(1, 2);
        let spectrum = [(0.8, r1), (-0.35, 1)];
        let rho = s.finite_rank(d, &spectrum);
        let dec = decompose(&rho, &tol).unwrap();
        prop_assert_eq!(dec.multiplicities(), &[r1, 1][..]);
        prop_assert!(reconstruct(&dec).matrix().distance(rho.matrix()) <= tol.recon_tol);
        for j in 0..=dec.block_count() {
            let p = lagrange_projector(&rho, &dec, j, &tol).unwrap();
            prop_assert!(p.matrix().distance(dec.projection(j).matrix()) <= tol.lagrange_tol);
        }
    }

    #[test]
    fn moments_are_unitarily_invariant(seed in any::<u64>(), d in 2usize..10) {
        let tol = Tolerances::default();
        let mut s = Sampler::new(seed);
        let rho = s.finite_rank(d, &[(0.6, 1), (0.2, 1)]);
        let u = s.unitary(d);
        let moved = rho.conjugate(&u);
        let a = moment_signature(&rho, None, &tol).unwrap();
        let b = moment_signature(&moved, None, &tol).unwrap();
        for (x, y) in a.moments.iter().zip(&b.moments) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
        let cmp = same_orbit(&rho, &moved, None, 1e-10, &tol).unwrap();
        prop_assert!(cmp.same && !cmp.anomaly);
        let other = HermitianOperator::from_real_diag(&[0.6, 0.25]);
        let other = orbitkit::suite::embed(other.matrix(), d);
        let other = HermitianOperator::symmetrized(other);
        prop_assert!(!same_orbit(&rho, &other, None, 1e-10, &tol).unwrap().same);
    }

    #[test]
    fn near_orbit_points_are_intertwined(seed in any::<u64>(), t in 1e-4f64..0.05) {
        let tol = Tolerances::default();
        let inst = OrbitInstance::with_perturbation(seed, t, &tol).unwrap();
        match orbit_outcome(&inst, ORBIT_EPSILON, &tol) {
            Outcome::Fail(m) => prop_assert!(false, "{}", m),
            Outcome::Pass(_) => {
                let c = orbit_intertwiner(&inst.rho, &inst.rho_prime, ORBIT_EPSILON, &tol).unwrap();
                prop_assert!(c.bound_ok && c.chain.holds());
            }
            _ => {}
        }
    }
}
