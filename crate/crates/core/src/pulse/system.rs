use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::SpinOperator;

/// Spins with rotating-frame offsets and scalar couplings.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinSystem {
    /// Offsets ω₀ⁿ in rad/s.
    offsets: Vec<f64>,
    /// Couplings Jᵐⁿ in Hz; symmetric with a zero diagonal.
    couplings: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingMode {
    /// Isotropic `2πJ (IxIx + IyIy + IzIz)`.
    Full,
    /// Secular `2πJ IzIz`.
    Weak,
}

/// On-disk form: offsets and couplings both in Hz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSystemFile {
    pub n: usize,
    pub offsets_hz: Vec<f64>,
    pub j_hz: Vec<Vec<f64>>,
}

impl SpinSystem {
    pub fn new(offsets: Vec<f64>, couplings: Vec<Vec<f64>>) -> Result<Self> {
        let n = offsets.len();
        if n == 0 || n > crate::pauli::MAX_SPINS {
            return Err(Error::SpinCount(n));
        }
        if offsets.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidArgument("offsets must be finite".into()));
        }
        if couplings.len() != n || couplings.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidArgument(format!("coupling matrix must be {n}x{n}")));
        }
        for (m, row) in couplings.iter().enumerate() {
            if row[m] != 0.0 {
                return Err(Error::InvalidArgument("coupling diagonal must be zero".into()));
            }
            for (k, &j) in row.iter().enumerate() {
                if !j.is_finite() || j != couplings[k][m] {
                    return Err(Error::InvalidArgument("couplings must be finite and symmetric".into()));
                }
            }
        }
        Ok(SpinSystem { offsets, couplings })
    }

    /// Offsets in Hz are converted to rad/s.
    pub fn from_hz(offsets_hz: &[f64], j_hz: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(offsets_hz.iter().map(|f| 2.0 * PI * f).collect(), j_hz)
    }

    /// On-resonance, uncoupled spins.
    pub fn uncoupled(n: usize) -> Self {
        SpinSystem { offsets: vec![0.0; n], couplings: vec![vec![0.0; n]; n] }
    }

    pub fn from_file(f: &SpinSystemFile) -> Result<Self> {
        if f.offsets_hz.len() != f.n {
            return Err(Error::InvalidArgument(format!("n = {} but {} offsets given", f.n, f.offsets_hz.len())));
        }
        Self::from_hz(&f.offsets_hz, f.j_hz.clone())
    }

    pub fn to_file(&self) -> SpinSystemFile {
        SpinSystemFile {
            n: self.n(),
            offsets_hz: self.offsets.iter().map(|w| w / (2.0 * PI)).collect(),
            j_hz: self.couplings.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len()
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn coupling(&self, m: usize, k: usize) -> f64 {
        self.couplings[m][k]
    }

    /// `−Σ ω₀ⁿ Izⁿ`.
    pub fn zeeman(&self) -> SpinOperator {
        let n = self.n();
        let mut h = SpinOperator::zero(n);
        for (k, &w) in self.offsets.iter().enumerate() {
            if w != 0.0 {
                h += &(SpinOperator::iz(n, k) * -w);
            }
        }
        h
    }

    pub fn j_coupling(&self, mode: CouplingMode) -> SpinOperator {
        let n = self.n();
        let mut h = SpinOperator::zero(n);
        for m in 0..n {
            for k in m + 1..n {
                let j = self.couplings[m][k];
                if j == 0.0 {
                    continue;
                }
                let mut t = SpinOperator::iz(n, m) * SpinOperator::iz(n, k);
                if mode == CouplingMode::Full {
                    t = t
                        + SpinOperator::ix(n, m) * SpinOperator::ix(n, k)
                        + SpinOperator::iy(n, m) * SpinOperator::iy(n, k);
                }
                h += &t.scaled(Complex64::new(2.0 * PI * j, 0.0));
            }
        }
        h
    }

    /// `H' = H_Z + 2π Σ J IzIz`, the secular Hamiltonian used for free evolution.
    pub fn weak_hamiltonian(&self) -> SpinOperator {
        self.zeeman() + self.j_coupling(CouplingMode::Weak)
    }

    /// Largest first-order mixing coefficient `π|J| / |Δω|` over coupled pairs.
    /// Infinite when a coupled pair has equal offsets.
    pub fn weak_coupling_validity(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for m in 0..n {
            for k in m + 1..n {
                let j = self.couplings[m][k];
                if j == 0.0 {
                    continue;
                }
                let dw = (self.offsets[m] - self.offsets[k]).abs();
                if dw == 0.0 {
                    return f64::INFINITY;
                }
                worst = worst.max(PI * j.abs() / dw);
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::dense;

    #[test]
    fn zeeman_eigenvalues() {
        let (a, b) = (3.0, 1.0);
        let s = SpinSystem::new(vec![a, b], vec![vec![0.0; 2]; 2]).unwrap();
        let ev = dense::hermitian_eigenvalues(&s.zeeman().to_dense().unwrap());
        let mut want = vec![-(a + b) / 2.0, -(a - b) / 2.0, (a - b) / 2.0, (a + b) / 2.0];
        want.sort_by(f64::total_cmp);
        for (x, y) in ev.iter().zip(&want) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(SpinSystem::uncoupled(3).zeeman().is_empty());
    }

    #[test]
    fn full_minus_weak() {
        let j = 7.0;
        let s = SpinSystem::from_hz(&[0.0, 500.0], vec![vec![0.0, j], vec![j, 0.0]]).unwrap();
        let d = s.j_coupling(CouplingMode::Full) - s.j_coupling(CouplingMode::Weak);
        let want = (SpinOperator::ix(2, 0) * SpinOperator::ix(2, 1) + SpinOperator::iy(2, 0) * SpinOperator::iy(2, 1))
            * (2.0 * PI * j);
        assert!(d.approx_eq(&want, 1e-12));
    }

    #[test]
    fn validity_ratio() {
        let s = SpinSystem::from_hz(&[0.0, 500.0], vec![vec![0.0, 7.0], vec![7.0, 0.0]]).unwrap();
        assert!((s.weak_coupling_validity() - 0.007).abs() < 1e-15);
        let d = SpinSystem::from_hz(&[10.0, 10.0], vec![vec![0.0, 7.0], vec![7.0, 0.0]]).unwrap();
        assert!(d.weak_coupling_validity().is_infinite());
        assert_eq!(SpinSystem::uncoupled(2).weak_coupling_validity(), 0.0);
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(SpinSystem::new(vec![0.0, 0.0], vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(SpinSystem::new(vec![0.0], vec![vec![1.0]]).is_err());
    }
}
