mod common;

use common::operator_strategy;
use num_complex::Complex64;
use proptest::prelude::*;
use spinops::decoherence::{dephase, monte_carlo_dephase, DephasingKind, DephasingModel};
use spinops::pauli::dense::{hermitian_eigenvalues, Matrix};
use spinops::pulse::crusher;
use spinops::SpinOperator;

fn models() -> [DephasingModel; 2] {
    [DephasingModel::uncorrelated(1.0).unwrap(), DephasingModel::correlated(1.0).unwrap()]
}

/// Choi matrix Σ |i⟩⟨j| ⊗ Φ(|i⟩⟨j|) of a map on `n` spins.
fn choi(n: usize, phi: impl Fn(&SpinOperator) -> SpinOperator) -> Matrix {
    let d = 1usize << n;
    let mut c = Matrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let mut e = Matrix::zeros(d, d);
            e[(i, j)] = Complex64::new(1.0, 0.0);
            let out = phi(&SpinOperator::from_dense(&e, n).unwrap()).to_dense().unwrap();
            for r in 0..d {
                for s in 0..d {
                    c[(i * d + r, j * d + s)] = out[(r, s)];
                }
            }
        }
    }
    c
}

#[test]
fn dephasing_is_completely_positive() {
    for model in models() {
        for t in [0.0, 0.3, 2.0] {
            let c = choi(2, |x| dephase(x, &model, t).unwrap());
            let ev = hermitian_eigenvalues(&c);
            assert!(ev[0] > -1e-12, "{:?} t={t}: {}", model.kind, ev[0]);
        }
    }
}

#[test]
fn crusher_is_completely_positive() {
    for retain in [false, true] {
        let ev = hermitian_eigenvalues(&choi(2, |x| crusher(x, retain)));
        assert!(ev[0] > -1e-12);
    }
}

#[test]
fn monte_carlo_matches_channel() {
    let rho = SpinOperator::from_terms([
        ("+-1", Complex64::new(1.0, 0.0)),
        ("++z", Complex64::new(0.5, 0.0)),
        ("+++", Complex64::new(0.25, 0.0)),
        ("z11", Complex64::new(1.0, 0.0)),
    ])
    .unwrap();
    for model in models() {
        let exact = dephase(&rho, &model, 0.4).unwrap().to_spherical();
        let mc = monte_carlo_dephase(&rho, &model, 0.4, 20_000, 5).unwrap();
        for (l, v) in exact.terms() {
            let m = mc.mean.to_spherical().coeff(l);
            let se = mc.std_error.to_spherical().coeff(l);
            assert!((m.re - v.re).abs() <= 4.0 * se.re + 1e-12, "{:?}", model.kind);
            assert!((m.im - v.im).abs() <= 4.0 * se.im + 1e-12);
        }
    }
}

#[test]
fn negative_time_rejected() {
    assert!(dephase(&SpinOperator::ix(1, 0), &models()[0], -0.1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn semigroup(rho in operator_strategy(3, true), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        for model in models() {
            let two = dephase(&dephase(&rho, &model, s).unwrap(), &model, t).unwrap();
            let one = dephase(&rho, &model, s + t).unwrap();
            prop_assert!(two.approx_eq(&one, 1e-12));
        }
    }

    #[test]
    fn trace_and_hermiticity_preserved(rho in operator_strategy(3, true), t in 0.0f64..3.0) {
        for model in models() {
            let out = dephase(&rho, &model, t).unwrap();
            prop_assert!((out.trace() - rho.trace()).norm() < 1e-12);
            prop_assert!(out.is_hermitian(1e-12));
        }
    }

    #[test]
    fn populations_untouched(rho in operator_strategy(3, true), t in 0.0f64..3.0) {
        let d0 = rho.diagonal().unwrap();
        for model in models() {
            let d = dephase(&rho, &model, t).unwrap().diagonal().unwrap();
            for (a, b) in d.iter().zip(&d0) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn crusher_idempotent(rho in operator_strategy(3, true), retain in any::<bool>()) {
        let once = crusher(&rho, retain);
        prop_assert!(crusher(&once, retain).approx_eq(&once, 1e-14));
        prop_assert!((once.trace() - rho.trace()).norm() < 1e-12);
        // the crushed state is invariant under collective z rotations
        let g = SpinOperator::iz(3, 0) + SpinOperator::iz(3, 1) + SpinOperator::iz(3, 2);
        prop_assert!(once.conjugate(&g, 0.7).unwrap().approx_eq(&once, 1e-12));
        if !retain {
            prop_assert!(once.is_diagonal());
        }
    }

    #[test]
    fn correlated_long_time_keeps_zero_quantum(rho in operator_strategy(2, true)) {
        let model = DephasingModel::new(DephasingKind::TotallyCorrelated, 1.0).unwrap();
        let late = dephase(&rho, &model, 60.0).unwrap();
        prop_assert!(late.approx_eq(&crusher(&rho, true), 1e-12));
    }
}
