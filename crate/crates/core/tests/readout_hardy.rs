mod common;

use common::operator_strategy;
use num_complex::Complex64;
use proptest::prelude::*;
use spinops::hardy::{
    ch_value, hardy_table, mermin_pseudo_pure, mermin_state, prepare_with, readout_protocol, run_combo, Combo,
    MeasurementBasis, ReadoutSetup,
};
use spinops::pauli::dense::expm_hermitian;
use spinops::pulse::SpinSystem;
use spinops::readout::{fid, AcquisitionParams};
use spinops::{DensityOperator, Form, SpinOperator};

fn three_spin() -> SpinSystem {
    SpinSystem::from_hz(
        &[-300.0, 150.0, 410.0],
        vec![vec![0.0, 12.0, 5.0], vec![12.0, 0.0, 30.0], vec![5.0, 30.0, 0.0]],
    )
    .unwrap()
}

/// `tr((Ix + iIy) ρ(t))` with ρ(t) propagated by the dense secular Hamiltonian.
fn dense_fid(rho: &SpinOperator, sys: &SpinSystem, acq: &AcquisitionParams) -> Vec<Complex64> {
    let n = rho.n();
    let h = sys.weak_hamiltonian().to_dense().unwrap();
    let mut det = SpinOperator::zero(n);
    for &s in &acq.observed {
        det = det + SpinOperator::ix(n, s) + SpinOperator::iy(n, s) * Complex64::new(0.0, 1.0);
    }
    let det = det.to_dense().unwrap();
    let r0 = rho.to_dense().unwrap();
    acq.times()
        .map(|t| {
            let u = expm_hermitian(&h, -t);
            let rt = &u * &r0 * u.adjoint();
            (&det * rt).trace() * (-acq.broadening * t).exp()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fid_matches_dense_evolution(rho in operator_strategy(3, false)) {
        let acq = AcquisitionParams::new(1e-3, 16, 3.0, vec![0, 2]).unwrap();
        let sys = three_spin();
        let a = fid(&rho, &sys, &acq).unwrap();
        let b = dense_fid(&rho, &sys, &acq);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn readout_chain_is_linear(a in operator_strategy(3, false), b in operator_strategy(3, false), k in -2.0f64..2.0) {
        let acq = AcquisitionParams::new(1e-3, 32, 3.0, vec![1]).unwrap();
        let sys = three_spin();
        let combo = &a + &(&b * k);
        let fa = fid(&a, &sys, &acq).unwrap();
        let fb = fid(&b, &sys, &acq).unwrap();
        let fc = fid(&combo, &sys, &acq).unwrap();
        for i in 0..fa.len() {
            prop_assert!((fc[i] - (fa[i] + fb[i] * k)).norm() < 1e-12);
        }
    }

    #[test]
    fn product_states_satisfy_ch(a in 0.0f64..std::f64::consts::PI, b in 0.0f64..std::f64::consts::PI) {
        // |ψ⟩ = R(a)|0⟩ ⊗ R(b)|0⟩ reached by the preparation rotations with θ = 0
        let ground = SpinOperator::e_plus(2, 0) * SpinOperator::e_plus(2, 1);
        let g = DensityOperator::new(ground, Form::Full).unwrap();
        let rho = g.conjugate(&SpinOperator::iy(2, 0), a).unwrap();
        let rho = prepare_with(&rho, b, 0.0).unwrap();
        let r = hardy_table(&rho).unwrap();
        prop_assert!(r.ch.unwrap() >= -1e-12);
        for e in &r.entries {
            prop_assert!((e.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(e.probabilities.iter().all(|&p| p > -1e-12));
        }
    }
}

#[test]
fn antiphase_signal_formula() {
    // ρ_xz with populations on the diagonal gives ½e^{iπJt}(p0−p2) + ½e^{−iπJt}(p1−p3)
    let p = [0.4, 0.3, 0.2, 0.1];
    let diag: Vec<Complex64> = p.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let rho = SpinOperator::from_diagonal(&diag)
        .unwrap()
        .conjugate(&SpinOperator::iy(2, 0), std::f64::consts::FRAC_PI_2)
        .unwrap();
    let j = 37.0;
    let sys = SpinSystem::from_hz(&[0.0, 0.0], vec![vec![0.0, j], vec![j, 0.0]]).unwrap();
    let acq = AcquisitionParams::new(7e-4, 64, 0.0, vec![0]).unwrap();
    let s = fid(&rho, &sys, &acq).unwrap();
    for (k, v) in s.iter().enumerate() {
        let t = k as f64 * 7e-4;
        let ph = std::f64::consts::PI * j * t;
        let want = Complex64::from_polar(0.5 * (p[0] - p[2]), ph) + Complex64::from_polar(0.5 * (p[1] - p[3]), -ph);
        assert!((v - want).norm() < 1e-12);
    }
}

#[test]
fn b_observable_expansion() {
    let proj = MeasurementBasis::B.g_projector(1, 0);
    let want = SpinOperator::scalar(1, Complex64::new(0.5, 0.0)) + SpinOperator::iz(1, 0) * 0.2
        - SpinOperator::ix(1, 0) * (24.0f64 / 25.0).sqrt();
    assert!(proj.approx_eq(&want, 1e-15));
    // projector onto the rotated ground state
    let m = proj.to_dense().unwrap();
    assert!(common::max_abs(&(&m * &m - &m)) < 1e-15);
    let rho = mermin_state().unwrap();
    for combo in Combo::ALL {
        let direct = run_combo(&rho, combo).unwrap().probabilities[0];
        let g = combo.0.g_projector(2, 0) * combo.1.g_projector(2, 1);
        let via = g.expectation(rho.op()).unwrap().re;
        assert!((direct - via).abs() < 1e-12);
    }
}

#[test]
fn mermin_expansion() {
    let rho = mermin_state().unwrap();
    let r = |x: f64| Complex64::new(x, 0.0);
    let expansion = |s: f64| {
        SpinOperator::from_terms([
            ("11", r(0.25)),
            ("z1", r(0.125)),
            ("1z", r(0.125)),
            ("zz", r(-0.5)),
            ("x1", r(s)),
            ("xz", r(2.0 * s)),
            ("1x", r(s)),
            ("zx", r(2.0 * s)),
            ("xx", r(0.75)),
            ("yy", r(0.75)),
        ])
        .unwrap()
    };
    // With the cross-term coefficient √(3/8) the operator is not a projector;
    // ψ = [½, √(3/8), √(3/8), 0] fixes it at ½√(3/8).
    let printed = expansion((3.0f64 / 8.0).sqrt());
    assert!(!(&printed * &printed).approx_eq(&printed, 1e-3));
    let want = expansion(0.5 * (3.0f64 / 8.0).sqrt());
    assert!((&want * &want).approx_eq(&want, 1e-12));
    assert!(rho.op().approx_eq(&want, 1e-12));
    let pp = mermin_pseudo_pure().unwrap();
    let want_pp = (want - SpinOperator::scalar(2, r(0.25))) * (1.0 / 3.0);
    assert!(pp.op().approx_eq(&want_pp, 1e-12));
}

#[test]
fn trivial_angles_keep_ground_state() {
    let g = DensityOperator::new(SpinOperator::e_plus(2, 0) * SpinOperator::e_plus(2, 1), Form::Full).unwrap();
    assert!(prepare_with(&g, 0.0, 0.0).unwrap().op().approx_eq(g.op(), 1e-15));
}

#[test]
fn identity_state_reads_uniform() {
    let rho = DensityOperator::maximally_mixed(2);
    for c in Combo::ALL {
        let e = readout_protocol(&rho, c, &ReadoutSetup::default()).unwrap();
        for p in e.probabilities {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }
}

#[test]
fn ground_state_satisfies_ch() {
    let g = DensityOperator::new(SpinOperator::e_plus(2, 0) * SpinOperator::e_plus(2, 1), Form::Full).unwrap();
    let r = hardy_table(&g).unwrap();
    assert!(ch_value(&r.entries).unwrap() >= 0.0);
}
