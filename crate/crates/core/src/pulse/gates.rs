use std::f64::consts::PI;

use super::sequence::{Axis, PulseSequence};
use crate::error::{Error, Result};
use crate::pauli::{Basis, SpinOperator};

fn distinct(n: usize, spins: &[usize]) -> Result<()> {
    let mut seen = 0u64;
    for &s in spins {
        if s >= n {
            return Err(Error::SpinIndex { spin: s, n });
        }
        if seen & (1 << s) != 0 {
            return Err(Error::IndexClash(s + 1));
        }
        seen |= 1 << s;
    }
    Ok(())
}

/// NOT on `target`: `[π Ixᵗ]`.
pub fn not_gate(n: usize, target: usize) -> Result<PulseSequence> {
    PulseSequence::new(n).rotate(PI, Axis::X, &[target])
}

/// c-NOT as the four-event sequence
/// `[−π/2 Iyᵗ] → [π Izᵗ Izᶜ] → [−π/2 Ixᵗ] → [−π/2 (Izᵗ + Izᶜ)]`.
/// It equals [`cnot_unitary`] up to a global phase.
pub fn cnot(n: usize, control: usize, target: usize) -> Result<PulseSequence> {
    distinct(n, &[control, target])?;
    PulseSequence::new(n)
        .rotate(-PI / 2.0, Axis::Y, &[target])?
        .zz(PI, target, control)?
        .rotate(-PI / 2.0, Axis::X, &[target])?
        .rotate(-PI / 2.0, Axis::Z, &[target, control])
}

/// `S^{t|c} = 2Ixᵗ E₋ᶜ + E₊ᶜ`: flips `target` when `control` is |1⟩.
pub fn cnot_unitary(n: usize, control: usize, target: usize) -> Result<SpinOperator> {
    distinct(n, &[control, target])?;
    Ok(SpinOperator::ix(n, target) * SpinOperator::e_minus(n, control) * 2.0 + SpinOperator::e_plus(n, control))
}

/// `T = 2Ixᵗ E₋^{c1} E₋^{c2} + (1 − E₋^{c1} E₋^{c2})`: flips `target` when
/// both controls are |1⟩. No phase factors are attached.
pub fn toffoli(n: usize, target: usize, controls: [usize; 2]) -> Result<SpinOperator> {
    distinct(n, &[target, controls[0], controls[1]])?;
    let cc = SpinOperator::e_minus(n, controls[0]) * SpinOperator::e_minus(n, controls[1]);
    Ok(SpinOperator::ix(n, target) * &cc * 2.0 + SpinOperator::identity(n) - cc)
}

/// Net coherence order of a spherical label: (#plus − #minus).
pub fn coherence_order(label: crate::pauli::PauliLabel) -> i32 {
    let (lo, hi) = label.planes();
    let t = lo ^ hi;
    (lo & t).count_ones() as i32 - (hi & t).count_ones() as i32
}

/// Ideal z-gradient crusher. Keeps spherical terms of net order 0; with
/// `retain_zqc == false` keeps only terms without transverse factors.
pub fn crusher(rho: &SpinOperator, retain_zqc: bool) -> SpinOperator {
    let sph = rho.to_spherical();
    let kept = sph.terms().filter(|(l, _)| if retain_zqc { coherence_order(*l) == 0 } else { l.transverse() == 0 });
    SpinOperator::from_label_map(rho.n(), Basis::Spherical, kept).in_basis(rho.basis())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::dense;

    #[test]
    fn cnot_sequence_matches_operator_up_to_phase() {
        let u = cnot(2, 1, 0).unwrap().compile().unwrap();
        let s = cnot_unitary(2, 1, 0).unwrap().to_dense().unwrap();
        let (dev, phase) = dense::deviation_up_to_phase(&u, &s, 1e-9);
        assert!(dev < 1e-12, "deviation {dev}");
        assert!((phase.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn toffoli_squares_to_identity() {
        let t = toffoli(3, 0, [1, 2]).unwrap();
        assert!((&t * &t).approx_eq(&SpinOperator::identity(3), 1e-14));
        let m = t.to_dense().unwrap();
        // |011⟩ = 3 goes to |111⟩ = 7
        assert!((m[(7, 3)].re - 1.0).abs() < 1e-14);
        assert!(toffoli(3, 0, [0, 2]).is_err());
    }

    #[test]
    fn crusher_rules() {
        let x = SpinOperator::ix(2, 0);
        assert!(crusher(&x, true).is_empty());
        let zz = SpinOperator::iz(2, 0) * SpinOperator::iz(2, 1);
        assert!(crusher(&zz, true).approx_eq(&zz, 1e-15));
        let zq = SpinOperator::ix(2, 0) * SpinOperator::ix(2, 1) + SpinOperator::iy(2, 0) * SpinOperator::iy(2, 1);
        assert!(crusher(&zq, true).approx_eq(&zq, 1e-15));
        assert!(crusher(&zq, false).is_empty());
    }
}
