mod common;

use common::max_abs;
use num_complex::Complex64;
use proptest::prelude::*;
use spinops::pauli::dense::{expm_hermitian, hermitian_eigenvalues};
use spinops::pulse::{cnot, cnot_unitary, Axis, PulseSequence, SpinSystem};
use spinops::state_prep::{
    cyclic_average, cyclic_permutation, equilibrium_hat, permute_diagonal, pseudo_pure, pseudo_pure_basis,
    pseudo_pure_prefactor,
};
use spinops::SpinOperator;

fn normalized(v: Vec<(f64, f64)>) -> Vec<Complex64> {
    let norm = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
    v.into_iter().map(|(a, b)| Complex64::new(a / norm, b / norm)).collect()
}

fn state_vector(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 0.1))
        .prop_map(normalized)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pseudo_pure_spectrum(psi in state_vector(3)) {
        let rho = pseudo_pure(&psi).unwrap();
        let k = pseudo_pure_prefactor(3);
        prop_assert!(rho.trace().norm() < 1e-12);
        let ev = hermitian_eigenvalues(&rho.to_dense().unwrap());
        prop_assert!((ev[7] - k * (1.0 - 0.125)).abs() < 1e-12);
        for e in &ev[..7] {
            prop_assert!((e + k * 0.125).abs() < 1e-12);
        }
        // the pure state is the top eigenvector
        let proj = rho.op().to_dense().unwrap();
        let v = spinops::pauli::Matrix::from_column_slice(8, 1, &psi);
        let top = (v.adjoint() * proj * v)[(0, 0)].re;
        prop_assert!((top - ev[7]).abs() < 1e-12);
    }

    #[test]
    fn pseudo_pure_basis_agrees(index in 0u64..16) {
        let mut psi = vec![Complex64::default(); 16];
        psi[index as usize] = Complex64::new(1.0, 0.0);
        let a = pseudo_pure(&psi).unwrap();
        let b = pseudo_pure_basis(4, index).unwrap();
        prop_assert!(a.op().approx_eq(b.op(), 1e-13));
    }

    #[test]
    fn pseudo_pure_is_unitarily_covariant(psi in state_vector(2), theta in -3.0f64..3.0) {
        let g = SpinOperator::iy(2, 0) * SpinOperator::ix(2, 1) + SpinOperator::iz(2, 1);
        let u = expm_hermitian(&g.to_dense().unwrap(), -theta);
        let v = spinops::pauli::Matrix::from_column_slice(4, 1, &psi);
        let moved: Vec<Complex64> = (&u * v).iter().copied().collect();
        let a = pseudo_pure(&psi).unwrap().conjugate(&g, theta).unwrap();
        let b = pseudo_pure(&moved).unwrap();
        prop_assert!(a.op().approx_eq(b.op(), 1e-12));
    }
}

#[test]
fn cyclic_average_is_shift_invariant() {
    for n in 1..=5 {
        let avg = cyclic_average(&equilibrium_hat(n).unwrap()).unwrap();
        let shifted = permute_diagonal(&avg, &cyclic_permutation(n, 1)).unwrap();
        assert!(avg.op().approx_eq(shifted.op(), 1e-14));
        let d = avg.diagonal().unwrap();
        for v in &d[2..] {
            assert!((v - d[1]).norm() < 1e-14);
        }
    }
}

#[test]
fn cnot_truth_table() {
    // control spin 2, target spin 1
    let u = cnot_unitary(2, 1, 0).unwrap();
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let e = |s: usize, bit: usize| {
            if bit == 0 {
                SpinOperator::e_plus(2, s)
            } else {
                SpinOperator::e_minus(2, s)
            }
        };
        let out = e(0, a) * e(1, b);
        let got = out.unitary_conjugate(&u).unwrap();
        let want = e(0, a ^ b) * e(1, b);
        assert!(got.approx_eq(&want, 1e-15));
    }
}

#[test]
fn sequence_text_round_trip() {
    let seq = cnot(3, 2, 0).unwrap().delay(0.001).unwrap().crush(true).unwrap();
    let text = seq.to_text().unwrap();
    let back = PulseSequence::parse(&text, 3).unwrap();
    assert_eq!(back.to_text().unwrap(), text);
    assert!(PulseSequence::parse("rot 90 q 1", 2).is_err());
    assert!(PulseSequence::parse("zz 180 1 1", 2).is_err());
    assert!(PulseSequence::parse("rot 90 x 3", 2).is_err());
}

#[test]
fn compiled_sequence_matches_operator_application() {
    let sys = SpinSystem::from_hz(
        &[120.0, -80.0, 30.0],
        vec![vec![0.0, 7.0, 0.0], vec![7.0, 0.0, 12.0], vec![0.0, 12.0, 0.0]],
    )
    .unwrap();
    let seq = PulseSequence::new(3)
        .rotate(0.7, Axis::X, &[0, 2])
        .unwrap()
        .delay(0.0031)
        .unwrap()
        .zz(1.1, 1, 2)
        .unwrap()
        .rotate(-0.4, Axis::Y, &[1])
        .unwrap();
    let rho = SpinOperator::ix(3, 0) * SpinOperator::iz(3, 1) + SpinOperator::iy(3, 2);
    let by_ops = seq.apply_in(&rho, &sys).unwrap().to_dense().unwrap();
    let u = seq.compile_with(&sys).unwrap();
    let dense = &u * rho.to_dense().unwrap() * u.adjoint();
    assert!(max_abs(&(by_ops - dense)) < 1e-11);
    assert!(seq.apply(&rho).is_err());
}

#[test]
fn delay_matches_secular_propagator() {
    let sys = SpinSystem::from_hz(&[50.0, -30.0], vec![vec![0.0, 9.0], vec![9.0, 0.0]]).unwrap();
    let t = 0.0123;
    let rho = SpinOperator::ix(2, 0) + SpinOperator::iy(2, 1) * SpinOperator::iz(2, 0);
    let out = PulseSequence::new(2).delay(t).unwrap().apply_in(&rho, &sys).unwrap();
    let u = expm_hermitian(&sys.weak_hamiltonian().to_dense().unwrap(), -t);
    let want = &u * rho.to_dense().unwrap() * u.adjoint();
    assert!(max_abs(&(out.to_dense().unwrap() - want)) < 1e-12);
}
