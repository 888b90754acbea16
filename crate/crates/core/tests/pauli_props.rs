use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use spinprep_core::pauli::{basis_change, estimate_from_distributions, grouping, subset_s2, total_s2, total_sz};
use spinprep_core::sim::{Shots, StateVector, observed_distribution};
use spinprep_core::{NoiseModel, ObservableSum, Pauli, PauliString};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn single(p: Pauli) -> DMatrix<Complex64> {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[one, z, z, one]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
    }
}

fn kron_oracle(letters: &[Pauli]) -> DMatrix<Complex64> {
    letters.iter().fold(DMatrix::from_element(1, 1, c(1.0, 0.0)), |acc, &p| acc.kronecker(&single(p)))
}

/// `S_q^a` as a dense matrix.
fn spin_op(n: usize, q: usize, a: Pauli) -> DMatrix<Complex64> {
    let letters: Vec<Pauli> = (0..n).map(|k| if k == q { a } else { Pauli::I }).collect();
    kron_oracle(&letters) * c(0.5, 0.0)
}

/// `(sum_{q in subset} S_q)^2` built from single-site matrices.
fn s2_oracle(n: usize, subset: &[usize]) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let mut total = DMatrix::zeros(dim, dim);
    for a in [Pauli::X, Pauli::Y, Pauli::Z] {
        let s: DMatrix<Complex64> =
            subset.iter().map(|&q| spin_op(n, q, a)).fold(DMatrix::zeros(dim, dim), |x, y| x + y);
        total += &s * &s;
    }
    total
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn letters_strategy(max_n: usize) -> impl Strategy<Value = Vec<Pauli>> {
    prop::collection::vec(prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)], 1..=max_n)
}

fn state_strategy(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| StateVector::from_amplitudes(v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
}

proptest! {
    #[test]
    fn pauli_matrix_matches_kronecker(letters in letters_strategy(5)) {
        let p = PauliString::from_letters(&letters).unwrap();
        prop_assert!(max_diff(&p.to_matrix(), &kron_oracle(&letters)) < 1e-15);
    }

    #[test]
    fn subset_s2_matches_oracle(n in 1usize..=5, mask in 1u32..32) {
        let subset: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        prop_assume!(!subset.is_empty());
        let obs = subset_s2(n, &subset).unwrap();
        prop_assert!(max_diff(&obs.to_matrix(), &s2_oracle(n, &subset)) < 1e-12);
    }

    #[test]
    fn expectation_matches_trace(psi in state_strategy(3), letters in letters_strategy(3)) {
        prop_assume!(letters.len() == 3);
        let p = PauliString::from_letters(&letters).unwrap();
        let obs = ObservableSum::from_terms(3, [(0.7, p)]).unwrap();
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        let want = (v.adjoint() * obs.to_matrix() * &v)[(0, 0)].re;
        prop_assert!((obs.expectation(&psi).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn grouped_estimate_is_exact(psi in state_strategy(3)) {
        let obs = total_s2(3).unwrap().plus(&total_sz(3).unwrap().scaled(0.3)).unwrap();
        let settings = grouping(&obs);
        let dists: Vec<Vec<f64>> = settings
            .iter()
            .map(|s| observed_distribution(&psi, &s.basis_change(), Shots::Exact, &NoiseModel::ideal(), 0).unwrap())
            .collect();
        let est = estimate_from_distributions(&obs, &settings, &dists).unwrap();
        prop_assert!((est - obs.expectation(&psi).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn basis_change_diagonalizes(letters in letters_strategy(3)) {
        // V P V^dag must be the Z-string on the same support.
        let n = letters.len();
        let p = PauliString::from_letters(&letters).unwrap();
        let v = spinprep_core::circuit::unitary_of(&basis_change(&letters)).unwrap();
        let zs: Vec<Pauli> = letters.iter().map(|&l| if l == Pauli::I { Pauli::I } else { Pauli::Z }).collect();
        let rotated = &v * p.to_matrix() * v.adjoint();
        prop_assert!(max_diff(&rotated, &kron_oracle(&zs)) < 1e-12, "n={}", n);
    }
}

#[test]
fn total_spin_spectrum() {
    for n in 1..=5usize {
        let m = total_s2(n).unwrap().to_matrix();
        let eig = m.symmetric_eigenvalues();
        for v in eig.iter() {
            let twice_l = (0..=n).find(|&t| {
                let l = t as f64 / 2.0;
                (v - l * (l + 1.0)).abs() < 1e-9
            });
            assert!(twice_l.is_some_and(|t| t % 2 == n % 2), "n={n}: eigenvalue {v}");
        }
        let trace: f64 = eig.iter().sum();
        assert!((trace - 0.75 * n as f64 * (1 << n) as f64).abs() < 1e-9);
    }
}

#[test]
fn chain_operators_commute() {
    let n = 4;
    let s2 = total_s2(n).unwrap().to_matrix();
    let sz = total_sz(n).unwrap().to_matrix();
    let comm =
        |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| (a * b - b * a).iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(comm(&s2, &sz) < 1e-12);
    for k in 2..=n {
        let prefix: Vec<usize> = (0..k).collect();
        let sk = subset_s2(n, &prefix).unwrap().to_matrix();
        assert!(comm(&s2, &sk) < 1e-12);
        assert!(comm(&sz, &sk) < 1e-12);
    }
}

#[test]
fn sampled_matches_exact() {
    let amps: Vec<Complex64> = (0..8).map(|k| c((k as f64 * 0.7).cos(), (k as f64 * 1.3).sin())).collect();
    let psi = StateVector::from_amplitudes(amps).unwrap();
    let obs = total_s2(3).unwrap();
    let settings = grouping(&obs);
    let shots = 1_000_000u64;
    let dists: Vec<Vec<f64>> = settings
        .iter()
        .enumerate()
        .map(|(k, s)| {
            observed_distribution(&psi, &s.basis_change(), Shots::Finite(shots), &NoiseModel::ideal(), k as u64)
                .unwrap()
        })
        .collect();
    let est = estimate_from_distributions(&obs, &settings, &dists).unwrap();
    let exact = obs.expectation(&psi).unwrap();
    // Each Pauli term has variance at most 1 per shot; the coefficients bound the spread.
    let sigma: f64 =
        obs.terms().iter().filter(|(_, p)| !p.is_identity()).map(|(w, _)| w.abs()).sum::<f64>() / (shots as f64).sqrt();
    assert!((est - exact).abs() < 5.0 * sigma, "{est} vs {exact}");
}
