#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use spinops::pauli::dense::Matrix;
use spinops::{Basis, PauliLabel, SpinOperator};

pub fn random_label<R: Rng>(rng: &mut R, n: usize) -> PauliLabel {
    (0..n).fold(PauliLabel::IDENTITY, |l, k| l.with_code(k, rng.random_range(0..4)))
}

/// Sparse random operator with up to `terms` Cartesian terms.
pub fn random_operator<R: Rng>(rng: &mut R, n: usize, terms: usize, hermitian: bool) -> SpinOperator {
    let t = (0..rng.random_range(1..=terms)).map(|_| {
        let l = random_label(rng, n);
        let re = rng.random_range(-1.0..1.0);
        let im = if hermitian { 0.0 } else { rng.random_range(-1.0..1.0) };
        (l, Complex64::new(re, im))
    });
    let op = SpinOperator::from_label_map(n, Basis::Cartesian, t);
    if rng.random_bool(0.3) {
        op.to_spherical()
    } else {
        op
    }
}

pub fn label_strategy(n: usize) -> impl Strategy<Value = PauliLabel> {
    proptest::collection::vec(0u8..4, n)
        .prop_map(|codes| codes.iter().enumerate().fold(PauliLabel::IDENTITY, |l, (k, &c)| l.with_code(k, c)))
}

pub fn operator_strategy(n: usize, hermitian: bool) -> impl Strategy<Value = SpinOperator> {
    proptest::collection::vec((label_strategy(n), -1.0f64..1.0, -1.0f64..1.0), 1..6).prop_map(move |terms| {
        SpinOperator::from_label_map(
            n,
            Basis::Cartesian,
            terms.into_iter().map(|(l, re, im)| (l, Complex64::new(re, if hermitian { 0.0 } else { im }))),
        )
    })
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
