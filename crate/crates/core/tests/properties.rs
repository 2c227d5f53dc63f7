use ktl::classical::{classical_orbit, ClassicalState};
use ktl::dynamics::{
    parity_operator, propagate, simulate, u_lmg, u_trot, DensityState, ErrorModel, LmgParams,
};
use ktl::fotoc::{fotoc_from_populations, fotoc_mixed, fotoc_pure, rotation_eigensystem};
use ktl::linalg::{commutator, max_abs, Matrix, I};
use ktl::rmt::{parity_permutation, sample_coe, sample_coe_parity, sample_cue, stream_rng};
use ktl::spin_algebra::{
    build_ops, rotation_about_axis, spin_coherent, unit_axis, QuantumState, RotationSpec,
    SpinQuantumNumber,
};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn params() -> impl Strategy<Value = (f64, f64, u32)> {
    (0.0..=1.0f64, 0.01..10.0f64, 1u32..=20)
}

fn commutes(a: &Matrix, b: &Matrix) -> f64 {
    max_abs(&commutator(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagators_are_unitary((s, tau, two_j) in params()) {
        let spin = SpinQuantumNumber::new(two_j).unwrap();
        let ops = build_ops(spin);
        let p = LmgParams::new(s, tau, spin).unwrap();
        prop_assert!(u_lmg(&p, &ops).unitarity_defect() < 1e-10);
        prop_assert!(u_trot(&p, &ops).unitarity_defect() < 1e-10);
    }

    #[test]
    fn parity_commutes_with_both_propagators((s, tau, two_j) in params()) {
        let spin = SpinQuantumNumber::new(two_j).unwrap();
        let ops = build_ops(spin);
        let p = LmgParams::new(s, tau, spin).unwrap();
        let r = parity_operator(&ops);
        prop_assert!(commutes(r.matrix(), u_lmg(&p, &ops).matrix()) < 1e-10);
        prop_assert!(commutes(r.matrix(), u_trot(&p, &ops).matrix()) < 1e-10);
    }

    #[test]
    fn projected_commutators(two_j in 1u32..=24, t1 in 0.0..PI, p1 in 0.0..2.0 * PI, t2 in 0.0..PI, p2 in 0.0..2.0 * PI) {
        // [n.J, m.J] = i (n x m).J
        let ops = build_ops(SpinQuantumNumber::new(two_j).unwrap());
        let (n, m) = (unit_axis(t1, p1), unit_axis(t2, p2));
        let cross = [
            n[1] * m[2] - n[2] * m[1],
            n[2] * m[0] - n[0] * m[2],
            n[0] * m[1] - n[1] * m[0],
        ];
        let lhs = commutator(&ops.along(n), &ops.along(m));
        let rhs = ops.along(cross) * I;
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-10 * (1.0 + two_j as f64).powi(2));
    }

    #[test]
    fn coherent_state_is_stretched(two_j in 1u32..=40, theta in 0.0..=PI, phi in 0.0..2.0 * PI) {
        let spin = SpinQuantumNumber::new(two_j).unwrap();
        let ops = build_ops(spin);
        let psi = spin_coherent(spin, theta, phi).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        let proj = psi.expectation(&ops.along(unit_axis(theta, phi))).re;
        prop_assert!((proj - spin.j()).abs() < 1e-9 * spin.j());
    }

    #[test]
    fn fotoc_formulas_agree(
        (s, tau, two_j) in params(),
        theta in 0.0..=PI,
        phi in 0.0..2.0 * PI,
        n in 0usize..40,
        chi in 0.0..2.0 * PI,
    ) {
        let spin = SpinQuantumNumber::new(two_j).unwrap();
        let ops = build_ops(spin);
        let p = LmgParams::new(s, tau, spin).unwrap();
        let spec = RotationSpec::optimal(theta, phi, spin.dim()).unwrap();
        let w = rotation_about_axis(&ops, &spec);
        let eig = rotation_eigensystem(&ops, &spec);
        let psi0 = spin_coherent(spin, theta, phi).unwrap();
        let psi = propagate(&u_trot(&p, &ops), &psi0, n).unwrap();

        let direct = fotoc_pure(&psi, &w).unwrap();
        let spectral = fotoc_from_populations(&eig.populations(&psi), &eig.eigenangles).unwrap();
        let mixed = fotoc_mixed(&DensityState::pure(&psi), &w).unwrap();
        prop_assert!((direct - spectral).abs() < 1e-10);
        prop_assert!((direct - mixed).abs() < 1e-10);
        prop_assert!((-1e-12..=1.0 + 1e-10).contains(&direct));

        let phased = QuantumState::new(psi.amplitudes() * Complex64::from_polar(1.0, chi)).unwrap();
        prop_assert!((fotoc_pure(&phased, &w).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn noisy_evolution_stays_a_density_matrix(
        (s, tau, two_j) in (0.0..=1.0f64, 0.01..5.0f64, 1u32..=12),
        f in 0.5..1.0f64,
        n in 0usize..30,
    ) {
        let spin = SpinQuantumNumber::new(two_j).unwrap();
        let ops = build_ops(spin);
        let p = LmgParams::new(s, tau, spin).unwrap();
        let psi0 = spin_coherent(spin, 1.0, 0.5).unwrap();
        let rho = simulate(&u_trot(&p, &ops), &ErrorModel::depolarizing(f).unwrap(), &psi0, n).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-10);
        prop_assert!(rho.min_eigenvalue() > -1e-10);
        prop_assert!(rho.purity() <= 1.0 + 1e-10);
        prop_assert!(rho.purity() >= 1.0 / spin.dim() as f64 - 1e-10);
    }

    #[test]
    fn ensemble_samples_have_their_symmetries(half in 1usize..=10, seed in any::<u64>()) {
        let d = 2 * half;
        let mut rng = stream_rng(seed, 0);
        let cue = sample_cue(d, &mut rng);
        let coe = sample_coe(d, &mut rng);
        let par = sample_coe_parity(d, &mut rng, &parity_permutation(d)).unwrap();
        for u in [&cue, &coe, &par] {
            prop_assert!(u.unitarity_defect() < 1e-10);
        }
        prop_assert!(max_abs(&(coe.matrix() - coe.matrix().transpose())) < 1e-10);
        let r = parity_operator(&build_ops(SpinQuantumNumber::from_dim(d).unwrap()));
        prop_assert!(commutes(r.matrix(), par.matrix()) < 1e-10);
    }

    #[test]
    fn classical_orbit_stays_on_sphere(s in 0.0..=1.0f64, tau in 0.01..10.0f64, theta in 0.0..PI, phi in 0.0..2.0 * PI) {
        let orbit = classical_orbit(&ClassicalState::from_angles(theta, phi), s, tau, 2000);
        for c in &orbit {
            prop_assert!((c.norm() - 1.0).abs() < 1e-12);
        }
    }
}
