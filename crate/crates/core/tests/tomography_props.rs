use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use spinprep_core::circuit::{Circuit, Gate};
use spinprep_core::sim::{DensityMatrix, NoiseModel, Shots, StateVector};
use spinprep_core::tomography::{TomoSettings, measure_state, project_psd, reconstruct, reconstruct_raw};

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| StateVector::from_amplitudes(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

fn hermitian(dim: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
        let m = DMatrix::from_iterator(dim, dim, v.into_iter().map(|(a, b)| Complex64::new(a, b)));
        (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
    })
}

fn exact_raw(rho: &DensityMatrix) -> DMatrix<Complex64> {
    let t = TomoSettings::full(rho.n_qubits(), Shots::Exact, 0).unwrap();
    reconstruct_raw(&measure_state(rho, &NoiseModel::ideal(), &t, None).unwrap()).unwrap()
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reconstruction_is_linear(a in state(2), b in state(2), alpha in 0.0f64..1.0, p in 0.0f64..1.0) {
        let ra = DensityMatrix::from_pure(&a).unwrap();
        let mut rb = DensityMatrix::from_pure(&b).unwrap();
        rb.depolarize(&[0], p).unwrap();
        let mix = ra.to_matrix() * Complex64::new(alpha, 0.0) + rb.to_matrix() * Complex64::new(1.0 - alpha, 0.0);
        let mixed = DensityMatrix::from_matrix(&mix).unwrap();
        let lhs = exact_raw(&mixed);
        let rhs = exact_raw(&ra) * Complex64::new(alpha, 0.0) + exact_raw(&rb) * Complex64::new(1.0 - alpha, 0.0);
        prop_assert!(max_diff(&lhs, &rhs) < 1e-10);
        prop_assert!(max_diff(&lhs, &mix) < 1e-10);
    }

    #[test]
    fn depolarized_states_recovered(psi in state(3), p in 0.0f64..1.0) {
        let mut rho = DensityMatrix::from_pure(&psi).unwrap();
        rho.depolarize(&[0, 1, 2], p).unwrap();
        let t = TomoSettings::full(3, Shots::Exact, 0).unwrap();
        let rec = reconstruct(&measure_state(&rho, &NoiseModel::ideal(), &t, None).unwrap()).unwrap();
        prop_assert!(max_diff(&rec.raw, &rho.to_matrix()) < 1e-10);
        prop_assert!(max_diff(&rec.projected.to_matrix(), &rho.to_matrix()) < 1e-10);
    }

    #[test]
    fn projection_satisfies_kkt(m in hermitian(4)) {
        let p = project_psd(&m);
        // Same eigenbasis: the projection commutes with the input.
        prop_assert!(max_diff(&(&p * &m), &(&m * &p)) < 1e-9);
        let mut lam: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        let mut mu: Vec<f64> = p.symmetric_eigenvalues().iter().copied().collect();
        lam.sort_by(f64::total_cmp);
        mu.sort_by(f64::total_cmp);
        prop_assert!((mu.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(mu.iter().all(|&x| x > -1e-10));
        // mu_i = max(lam_i - tau, 0) with one shift tau for every positive mu_i.
        let positive: Vec<usize> = (0..4).filter(|&i| mu[i] > 1e-9).collect();
        let tau = lam[positive[0]] - mu[positive[0]];
        for i in 0..4 {
            prop_assert!((mu[i] - (lam[i] - tau).max(0.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn purity_invariant_under_global_rotation(psi in state(2), p in 0.0f64..1.0, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut rho = DensityMatrix::from_pure(&psi).unwrap();
        rho.depolarize(&[1], p).unwrap();
        let mut rotated = rho.clone();
        let u = Circuit::from_gates(2, [Gate::ry(0, a), Gate::rz(1, b), Gate::cnot(0, 1), Gate::rx(1, a * b)]).unwrap();
        rotated.evolve(&u).unwrap();
        let t = TomoSettings::full(2, Shots::Exact, 0).unwrap();
        let p0 = reconstruct(&measure_state(&rho, &NoiseModel::ideal(), &t, None).unwrap()).unwrap().projected.purity();
        let p1 = reconstruct(&measure_state(&rotated, &NoiseModel::ideal(), &t, None).unwrap()).unwrap().projected.purity();
        prop_assert!((p0 - p1).abs() < 1e-10);
    }
}

#[test]
fn fully_depolarized_anchor() {
    for n in 1..=3usize {
        let rho = DensityMatrix::maximally_mixed(n).unwrap();
        let t = TomoSettings::full(n, Shots::Exact, 0).unwrap();
        let rec = reconstruct(&measure_state(&rho, &NoiseModel::ideal(), &t, None).unwrap()).unwrap();
        let psi = StateVector::zero_state(n).unwrap();
        let q = spinprep_core::tomography::report(&rec.projected, &psi).unwrap();
        let want = 1.0 / (1u32 << n) as f64;
        assert!((q.fidelity - want).abs() < 1e-12);
        assert!((q.purity - want).abs() < 1e-12);
    }
}
