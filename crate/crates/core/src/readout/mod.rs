//! FID synthesis, spectra, line amplitudes and population estimation.
//!
//! The detected signal is `tr((Ix + iIy) ρ(t))` summed over observed spins,
//! with `ρ(t)` evolving under the secular Hamiltonian. Since `H_Z = −ωIz`, a
//! spin with offset ω contributes `e^{−iωt}`; the spectrum uses the kernel
//! `e^{+i2πft}` so that this line appears at `f = +ω/2π`.

mod lsq;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

pub use lsq::{constrained_least_squares, height_matrix, peak_heights_to_probabilities, Calibration};

use crate::error::{Error, Result};
use crate::pauli::SpinOperator;
use crate::pulse::SpinSystem;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionParams {
    /// Sampling interval in seconds.
    pub dwell: f64,
    pub points: usize,
    /// Exponential line broadening 1/T₂* in s⁻¹.
    pub broadening: f64,
    /// Spins whose transverse magnetization is detected (0-based).
    pub observed: Vec<usize>,
    /// Zero-filling factor applied before the transform (1 = none).
    pub zero_fill: usize,
}

impl AcquisitionParams {
    pub fn new(dwell: f64, points: usize, broadening: f64, observed: Vec<usize>) -> Result<Self> {
        let p = AcquisitionParams { dwell, points, broadening, observed, zero_fill: 1 };
        p.check()?;
        Ok(p)
    }

    pub fn with_zero_fill(mut self, factor: usize) -> Result<Self> {
        self.zero_fill = factor;
        self.check()?;
        Ok(self)
    }

    /// Same acquisition, one observed spin.
    pub fn observing(&self, spin: usize) -> Self {
        AcquisitionParams { observed: vec![spin], ..self.clone() }
    }

    fn check(&self) -> Result<()> {
        if !(self.dwell.is_finite() && self.dwell > 0.0) {
            return Err(Error::InvalidArgument("dwell must be positive".into()));
        }
        if self.points < 2 {
            return Err(Error::InvalidArgument("need at least two points".into()));
        }
        if !(self.broadening.is_finite() && self.broadening >= 0.0) {
            return Err(Error::InvalidArgument("broadening must be nonnegative".into()));
        }
        if self.zero_fill == 0 {
            return Err(Error::InvalidArgument("zero-fill factor must be at least 1".into()));
        }
        Ok(())
    }

    fn check_for(&self, n: usize) -> Result<()> {
        self.check()?;
        let mut seen = 0u64;
        for &s in &self.observed {
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

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |k| k as f64 * self.dwell)
    }

    /// Frequency of spectrum bin `j` (after the shift that puts 0 Hz in the middle).
    pub fn bin_frequency(&self, j: usize) -> f64 {
        let m = self.points * self.zero_fill;
        (j as f64 - (m / 2) as f64) / (m as f64 * self.dwell)
    }

    pub fn nearest_bin(&self, freq: f64) -> usize {
        let m = self.points * self.zero_fill;
        let j = (freq * m as f64 * self.dwell).round() + (m / 2) as f64;
        j.clamp(0.0, (m - 1) as f64) as usize
    }
}

/// Energies of the computational basis states under the secular Hamiltonian.
fn energies(system: &SpinSystem) -> Vec<f64> {
    let n = system.n();
    (0..1usize << n)
        .map(|idx| {
            let z = |k: usize| if (idx >> (n - 1 - k)) & 1 == 0 { 0.5 } else { -0.5 };
            let mut e = 0.0;
            for k in 0..n {
                e -= system.offsets()[k] * z(k);
                for m in k + 1..n {
                    e += 2.0 * PI * system.coupling(k, m) * z(k) * z(m);
                }
            }
            e
        })
        .collect()
}

/// One transition of `spin`: the other spins are fixed in the states given by `rest`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub spin: usize,
    /// Bit mask (spin `k` at bit `k`) of the other spins that are in |1⟩.
    pub rest: u64,
    pub freq_hz: f64,
}

/// Index of the basis state with `spin` set to `bit` and the others from `rest`.
fn basis_index(n: usize, spin: usize, bit: usize, rest: u64) -> usize {
    let mut idx = 0usize;
    for k in 0..n {
        let b = if k == spin { bit } else { ((rest >> k) & 1) as usize };
        idx |= b << (n - 1 - k);
    }
    idx
}

/// Rest masks of the other spins, in the order used for height vectors.
fn rest_masks(n: usize, spin: usize) -> Vec<u64> {
    let others: Vec<usize> = (0..n).filter(|&k| k != spin).collect();
    (0..1u64 << others.len())
        .map(|r| {
            let mut mask = 0u64;
            for (j, &k) in others.iter().enumerate() {
                if (r >> (others.len() - 1 - j)) & 1 == 1 {
                    mask |= 1 << k;
                }
            }
            mask
        })
        .collect()
}

/// The 2^{N−1} lines of `spin`, at `ω/2π − Σ_m J·z_m` for the other spins' `z_m = ±½`.
pub fn lines(system: &SpinSystem, spin: usize) -> Result<Vec<Line>> {
    let n = system.n();
    if spin >= n {
        return Err(Error::SpinIndex { spin, n });
    }
    let e = energies(system);
    Ok(rest_masks(n, spin)
        .into_iter()
        .map(|rest| {
            let l = basis_index(n, spin, 0, rest);
            let k = basis_index(n, spin, 1, rest);
            Line { spin, rest, freq_hz: (e[k] - e[l]) / (2.0 * PI) }
        })
        .collect())
}

/// `s(t_k) = Σ_observed tr((Ix + iIy) ρ(t_k)) e^{−t_k/T₂*}`.
pub fn fid(rho: &SpinOperator, system: &SpinSystem, acq: &AcquisitionParams) -> Result<Vec<Complex64>> {
    let n = rho.n();
    if system.n() != n {
        return Err(Error::DimensionMismatch(n, system.n()));
    }
    acq.check_for(n)?;
    if n > 20 {
        return Err(Error::DenseLimit { n, limit: 20 });
    }
    let e = energies(system);
    let mut tones: Vec<(f64, Complex64)> = Vec::new();
    for &spin in &acq.observed {
        for rest in rest_masks(n, spin) {
            let l = basis_index(n, spin, 0, rest);
            let k = basis_index(n, spin, 1, rest);
            let amp = rho.element(k, l);
            if amp.norm() > 0.0 {
                tones.push((e[k] - e[l], amp));
            }
        }
    }
    Ok(acq
        .times()
        .map(|t| {
            let decay = (-acq.broadening * t).exp();
            tones.iter().map(|(w, a)| a * Complex64::from_polar(decay, -w * t)).sum()
        })
        .collect())
}

/// Unit tone at `freq_hz` with the acquisition's broadening.
pub fn reference_tone(freq_hz: f64, acq: &AcquisitionParams) -> Vec<Complex64> {
    acq.times().map(|t| Complex64::from_polar((-acq.broadening * t).exp(), -2.0 * PI * freq_hz * t)).collect()
}

/// `S(f_j) = Σ_k s_k e^{+i2π f_j t_k}` on the shifted frequency grid (Hz, transmitter at 0).
pub fn spectrum(fid: &[Complex64], acq: &AcquisitionParams) -> Result<Vec<(f64, Complex64)>> {
    acq.check()?;
    if fid.len() != acq.points {
        return Err(Error::InvalidArgument(format!(
            "FID has {} points, acquisition expects {}",
            fid.len(),
            acq.points
        )));
    }
    let m = acq.points * acq.zero_fill;
    let mut buf = fid.to_vec();
    buf.resize(m, Complex64::default());
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    Ok((0..m).map(|j| (acq.bin_frequency(j), buf[(j + m - m / 2) % m])).collect())
}

/// Line amplitudes recovered from a spectrum.
///
/// The value at each line's nearest bin mixes contributions from every line
/// through broadening and leakage. Unit reference tones synthesized with the
/// same acquisition give that mixing matrix, and solving it returns the
/// time-domain amplitude of each line.
pub fn line_amplitudes(spec: &[(f64, Complex64)], lines: &[Line], acq: &AcquisitionParams) -> Result<Vec<Complex64>> {
    if lines.is_empty() {
        return Ok(Vec::new());
    }
    let bins: Vec<usize> = lines.iter().map(|l| acq.nearest_bin(l.freq_hz)).collect();
    let l = lines.len();
    let mut mix = DMatrix::<Complex64>::zeros(l, l);
    for (j, line) in lines.iter().enumerate() {
        let s = spectrum(&reference_tone(line.freq_hz, acq), acq)?;
        for (i, &b) in bins.iter().enumerate() {
            mix[(i, j)] = s[b].1;
        }
    }
    let rhs = nalgebra::DVector::from_iterator(l, bins.iter().map(|&b| spec[b].1));
    let svd = mix.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.rank(smax * 1e-9);
    if rank < l {
        return Err(Error::RankDeficient { rank, needed: l });
    }
    let a = svd.solve(&rhs, smax * 1e-12).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(a.iter().copied().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Absorptive,
    Dispersive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Inphase,
    Antiphase,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub line: Line,
    pub amplitude: Complex64,
    pub shape: Shape,
    /// Relative to the partner line differing in the lowest-numbered coupled spin.
    pub phase: Phase,
}

/// Synthesizes the spectrum of `rho` and classifies every line of the observed spins.
pub fn peaks(rho: &SpinOperator, system: &SpinSystem, acq: &AcquisitionParams) -> Result<Vec<Peak>> {
    let spec = spectrum(&fid(rho, system, acq)?, acq)?;
    let all: Vec<Line> = acq.observed.iter().map(|&s| lines(system, s)).collect::<Result<Vec<_>>>()?.concat();
    let amps = line_amplitudes(&spec, &all, acq)?;
    let dominant = |a: Complex64| if a.re.abs() >= a.im.abs() { a.re } else { a.im };
    Ok(all
        .iter()
        .zip(&amps)
        .map(|(line, &a)| {
            let partner = (0..system.n())
                .filter(|&k| k != line.spin && system.coupling(line.spin, k) != 0.0)
                .min()
                .and_then(|k| all.iter().position(|o| o.spin == line.spin && o.rest == line.rest ^ (1 << k)));
            let phase = match partner {
                Some(p) if dominant(a) * dominant(amps[p]) < 0.0 => Phase::Antiphase,
                _ => Phase::Inphase,
            };
            Peak {
                line: line.clone(),
                amplitude: a,
                shape: if a.re.abs() >= a.im.abs() { Shape::Absorptive } else { Shape::Dispersive },
                phase,
            }
        })
        .collect())
}

/// Real line amplitudes of `spin`, i.e. half the population differences for a
/// diagonal state after a selective π/2 readout pulse.
pub fn line_heights(rho: &SpinOperator, system: &SpinSystem, acq: &AcquisitionParams, spin: usize) -> Result<Vec<f64>> {
    let acq = acq.observing(spin);
    let spec = spectrum(&fid(rho, system, &acq)?, &acq)?;
    let ls = lines(system, spin)?;
    Ok(line_amplitudes(&spec, &ls, &acq)?.iter().map(|a| a.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_spin() -> SpinSystem {
        SpinSystem::from_hz(&[-400.0, 400.0], vec![vec![0.0, 200.0], vec![200.0, 0.0]]).unwrap()
    }

    fn acq() -> AcquisitionParams {
        AcquisitionParams::new(1.0 / 2048.0, 1024, 5.0, vec![0]).unwrap()
    }

    #[test]
    fn single_tone_sign() {
        let sys = SpinSystem::from_hz(&[100.0], vec![vec![0.0]]).unwrap();
        let a = AcquisitionParams::new(1e-3, 8, 0.0, vec![0]).unwrap();
        let s = fid(&SpinOperator::ix(1, 0), &sys, &a).unwrap();
        for (k, v) in s.iter().enumerate() {
            let t = k as f64 * 1e-3;
            let want = Complex64::from_polar(0.5, -2.0 * PI * 100.0 * t);
            assert!((v - want).norm() < 1e-14);
        }
    }

    #[test]
    fn identity_gives_no_signal() {
        let s = fid(&SpinOperator::identity(2), &two_spin(), &acq()).unwrap();
        assert!(s.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn line_positions() {
        let ls = lines(&two_spin(), 0).unwrap();
        let f: Vec<f64> = ls.iter().map(|l| l.freq_hz).collect();
        assert!((f[0] + 500.0).abs() < 1e-9 && (f[1] + 300.0).abs() < 1e-9, "{f:?}");
    }

    #[test]
    fn inphase_and_antiphase() {
        let sys = two_spin();
        let p = peaks(&SpinOperator::ix(2, 0), &sys, &acq()).unwrap();
        assert!(p.iter().all(|x| x.shape == Shape::Absorptive && x.phase == Phase::Inphase));
        assert!(p.iter().all(|x| (x.amplitude.re - 0.5).abs() < 1e-10));
        let anti = SpinOperator::ix(2, 0) * SpinOperator::iz(2, 1) * 2.0;
        let p = peaks(&anti, &sys, &acq()).unwrap();
        assert!(p.iter().all(|x| x.phase == Phase::Antiphase));
        assert!(p[0].amplitude.re * p[1].amplitude.re < 0.0);
        let p = peaks(&SpinOperator::iy(2, 0), &sys, &acq()).unwrap();
        assert!(p.iter().all(|x| x.shape == Shape::Dispersive));
    }

    #[test]
    fn parseval() {
        let s = fid(&SpinOperator::ix(2, 0), &two_spin(), &acq()).unwrap();
        let spec = spectrum(&s, &acq()).unwrap();
        let et: f64 = s.iter().map(|v| v.norm_sqr()).sum();
        let ef: f64 = spec.iter().map(|(_, v)| v.norm_sqr()).sum();
        assert!((ef - 1024.0 * et).abs() < 1e-9 * ef);
    }
}
