//! Hardy paradox and the Clauser–Horne inequality on a two-spin Mermin state.
//!
//! Outcome G maps to |0⟩ and R to |1⟩, so diagonal index order is GG, GR, RG, RR.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{DensityOperator, Form, SpinOperator};
use crate::pulse::{crusher, SpinSystem};
use crate::readout::{line_heights, lines, peak_heights_to_probabilities, AcquisitionParams, Calibration};

/// Angle of the first preparation rotation, `2·atan√(3/5)`.
pub fn phi() -> f64 {
    2.0 * (3.0f64 / 5.0).sqrt().atan()
}

/// Angle of the conditional preparation rotation, `2·atan√(3/2)`.
pub fn theta() -> f64 {
    2.0 * (3.0f64 / 2.0).sqrt().atan()
}

/// Inclination of the B measurement axis, `atan√24`.
pub fn zeta() -> f64 {
    24f64.sqrt().atan()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasurementBasis {
    A,
    B,
}

impl MeasurementBasis {
    /// Rotation about y applied before a computational-basis readout.
    pub fn angle(self) -> f64 {
        match self {
            MeasurementBasis::A => 0.0,
            MeasurementBasis::B => zeta(),
        }
    }

    /// Projector onto the G outcome for spin `spin` of `n`.
    pub fn g_projector(self, n: usize, spin: usize) -> SpinOperator {
        let (c, s) = (self.angle().cos(), self.angle().sin());
        SpinOperator::scalar(n, Complex64::new(0.5, 0.0)) + SpinOperator::iz(n, spin) * c
            - SpinOperator::ix(n, spin) * s
    }
}

/// Measurement bases for spins 1 and 2; serialized as e.g. `"AB"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Combo(pub MeasurementBasis, pub MeasurementBasis);

impl Combo {
    pub const ALL: [Combo; 4] = [
        Combo(MeasurementBasis::A, MeasurementBasis::A),
        Combo(MeasurementBasis::A, MeasurementBasis::B),
        Combo(MeasurementBasis::B, MeasurementBasis::A),
        Combo(MeasurementBasis::B, MeasurementBasis::B),
    ];

    fn rotated(self, rho: &SpinOperator) -> Result<SpinOperator> {
        let mut out = rho.clone();
        for (spin, b) in [(0, self.0), (1, self.1)] {
            if b == MeasurementBasis::B {
                out = out.conjugate(&SpinOperator::iy(2, spin), zeta())?;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Combo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:?}", self.0, self.1)
    }
}

impl From<Combo> for String {
    fn from(c: Combo) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for Combo {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for Combo {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let basis = |c: char| match c.to_ascii_uppercase() {
            'A' => Some(MeasurementBasis::A),
            'B' => Some(MeasurementBasis::B),
            _ => None,
        };
        let mut chars = s.chars();
        match (chars.next().and_then(basis), chars.next().and_then(basis), chars.next()) {
            (Some(a), Some(b), None) => Ok(Combo(a, b)),
            _ => Err(Error::Unknown { kind: "combo", name: s.to_string() }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyEntry {
    pub combo: Combo,
    /// Probabilities of GG, GR, RG, RR.
    pub probabilities: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyResult {
    pub entries: Vec<HardyEntry>,
    pub ch: Option<f64>,
}

impl HardyResult {
    pub fn new(entries: Vec<HardyEntry>) -> Self {
        let ch = ch_value(&entries).ok();
        HardyResult { entries, ch }
    }

    pub fn get(&self, combo: Combo) -> Option<&HardyEntry> {
        self.entries.iter().find(|e| e.combo == combo)
    }
}

fn check_two_spin(rho: &SpinOperator) -> Result<()> {
    if rho.n() != 2 {
        return Err(Error::DimensionMismatch(2, rho.n()));
    }
    Ok(())
}

/// Applies `P(φ) = exp(−iφIy²)` and then `Q(θ) = exp(−iθIy¹E₊²)`.
pub fn prepare_mermin(rho00: &DensityOperator) -> Result<DensityOperator> {
    prepare_with(rho00, phi(), theta())
}

/// [`prepare_mermin`] with explicit angles.
pub fn prepare_with(rho00: &DensityOperator, phi: f64, theta: f64) -> Result<DensityOperator> {
    check_two_spin(rho00)?;
    let q = SpinOperator::iy(2, 0) * SpinOperator::e_plus(2, 1).to_cartesian();
    rho00.conjugate(&SpinOperator::iy(2, 1), phi)?.conjugate(&q, theta)
}

/// The pure Mermin state Ψ = |ψ⟩⟨ψ|, ψ = [½, √(3/8), √(3/8), 0].
pub fn mermin_state() -> Result<DensityOperator> {
    let ground = SpinOperator::e_plus(2, 0).to_cartesian() * SpinOperator::e_plus(2, 1).to_cartesian();
    prepare_mermin(&DensityOperator::new(ground, Form::Full)?)
}

/// Pseudo-pure analogue `⅓(Ψ − ¼)`.
pub fn mermin_pseudo_pure() -> Result<DensityOperator> {
    prepare_mermin(&crate::state_prep::pseudo_pure_basis(2, 0)?)
}

/// Pseudo-pure scale `κ` of a traceless state `κ(Ψ − 2^{−N})` with Ψ pure.
pub fn pseudo_pure_scale(hat: &SpinOperator) -> Result<f64> {
    let purity = hat.expectation(hat)?.re;
    Ok((purity.max(0.0) / (1.0 - 2f64.powi(-(hat.n() as i32)))).sqrt())
}

/// Rotates into `combo`, crushes all coherences and reads the diagonal.
///
/// Full-form states give their diagonal directly. Traceless states are taken
/// to be pseudo-pure and rescaled by their pseudo-pure scale, which is
/// computed before crushing.
pub fn run_combo(rho: &DensityOperator, combo: Combo) -> Result<HardyEntry> {
    check_two_spin(rho)?;
    let crushed = crusher(&combo.rotated(rho.op())?, false);
    let diag = crushed.diagonal()?;
    let mut p = [0.0; 4];
    match rho.form() {
        Form::Full => {
            for (pi, d) in p.iter_mut().zip(&diag) {
                *pi = d.re;
            }
        }
        Form::Traceless => {
            let kappa = pseudo_pure_scale(rho.op())?;
            for (pi, d) in p.iter_mut().zip(&diag) {
                *pi = if kappa > 1e-300 { 0.25 + d.re / kappa } else { 0.25 };
            }
        }
    }
    Ok(HardyEntry { combo, probabilities: p })
}

/// `Ψ_GG^AB + Ψ_RR^AA + Ψ_GG^BA − Ψ_GG^BB`; negative values violate the inequality.
pub fn ch_value(entries: &[HardyEntry]) -> Result<f64> {
    let get = |c: Combo| {
        entries.iter().find(|e| e.combo == c).map(|e| e.probabilities).ok_or_else(|| Error::MissingCombo(c.to_string()))
    };
    let [aa, ab, ba, bb] = Combo::ALL;
    Ok(get(ab)?[0] + get(aa)?[3] + get(ba)?[0] - get(bb)?[0])
}

/// All four combos by direct diagonal readout.
pub fn hardy_table(rho: &DensityOperator) -> Result<HardyResult> {
    let entries = Combo::ALL.iter().map(|&c| run_combo(rho, c)).collect::<Result<Vec<_>>>()?;
    Ok(HardyResult::new(entries))
}

/// Spin system and acquisition used to synthesize the readout spectra.
#[derive(Clone, Debug, PartialEq)]
pub struct ReadoutSetup {
    pub system: SpinSystem,
    pub acquisition: AcquisitionParams,
}

impl Default for ReadoutSetup {
    fn default() -> Self {
        ReadoutSetup {
            system: SpinSystem::from_hz(&[-400.0, 400.0], vec![vec![0.0, 200.0], vec![200.0, 0.0]])
                .expect("valid default system"),
            acquisition: AcquisitionParams::new(1.0 / 2048.0, 1024, 10.0, vec![0]).expect("valid default acquisition"),
        }
    }
}

/// Ground state matching the normalization of `rho`: pure |00⟩ for full-form
/// states, the pseudo-pure ground state for traceless ones.
pub fn reference_ground(rho: &DensityOperator) -> Result<DensityOperator> {
    match rho.form() {
        Form::Full => {
            let g = SpinOperator::e_plus(2, 0).to_cartesian() * SpinOperator::e_plus(2, 1).to_cartesian();
            DensityOperator::new(g, Form::Full)
        }
        Form::Traceless => crate::state_prep::pseudo_pure_basis(2, 0),
    }
}

/// Line heights of both spins (spin-major) after crushing and a selective
/// π/2 readout pulse about y on each spin in turn.
fn readout_heights(rho: &SpinOperator, setup: &ReadoutSetup) -> Result<Vec<f64>> {
    let crushed = crusher(rho, false);
    let mut out = Vec::with_capacity(4);
    for spin in 0..2 {
        let read = crushed.conjugate(&SpinOperator::iy(2, spin), std::f64::consts::FRAC_PI_2)?;
        out.extend(line_heights(&read, &setup.system, &setup.acquisition, spin)?);
    }
    Ok(out)
}

/// Noiseless heights of the ten spectra: calibration lines then each combo's lines.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectra {
    /// Height of each spin's ground-state line.
    pub calibration: [f64; 2],
    pub combos: Vec<(Combo, Vec<f64>)>,
}

pub fn synthesize_spectra(rho: &DensityOperator, ground: &DensityOperator, setup: &ReadoutSetup) -> Result<Spectra> {
    check_two_spin(rho)?;
    check_two_spin(ground)?;
    let g = readout_heights(ground.op(), setup)?;
    // rest = 0 is the first line of each spin
    let per = lines(&setup.system, 0)?.len();
    let calibration = [g[0], g[per]];
    let combos = Combo::ALL
        .iter()
        .map(|&c| Ok((c, readout_heights(&c.rotated(rho.op())?, setup)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectra { calibration, combos })
}

impl Spectra {
    /// Estimates the table, adding Gaussian noise of `sigma` (in units where a
    /// full-polarization line is ½) to every height when `rng` is given.
    pub fn estimate<R: Rng>(&self, sigma: f64, mut rng: Option<&mut R>) -> Result<HardyResult> {
        let scale = [2.0 * self.calibration[0], 2.0 * self.calibration[1]];
        let normal = Normal::new(0.0, sigma.max(0.0)).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let mut noisy = |h: f64, spin: usize| match rng.as_mut() {
            Some(r) if sigma > 0.0 => h + scale[spin] * normal.sample(r),
            _ => h,
        };
        let gains = vec![noisy(self.calibration[0], 0) / 0.5, noisy(self.calibration[1], 1) / 0.5];
        let cal = Calibration { gains };
        let mut entries = Vec::with_capacity(4);
        for (combo, heights) in &self.combos {
            let per = heights.len() / 2;
            let h: Vec<f64> = heights.iter().enumerate().map(|(i, &h)| noisy(h, i / per)).collect();
            let p = peak_heights_to_probabilities(2, &h, &cal)?;
            entries.push(HardyEntry { combo: *combo, probabilities: [p[0], p[1], p[2], p[3]] });
        }
        Ok(HardyResult::new(entries))
    }
}

/// One combo through the full spectral readout path, noiseless.
pub fn readout_protocol(rho: &DensityOperator, combo: Combo, setup: &ReadoutSetup) -> Result<HardyEntry> {
    let ground = reference_ground(rho)?;
    let spectra = synthesize_spectra(rho, &ground, setup)?;
    let result = spectra.estimate::<ChaCha8Rng>(0.0, None)?;
    Ok(result.get(combo).cloned().expect("all combos are synthesized"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisyCh {
    pub sigma: f64,
    pub trials: usize,
    pub seed: u64,
    pub mean: f64,
    pub std_dev: f64,
    /// Mean probabilities per combo over all trials.
    pub mean_table: Vec<HardyEntry>,
}

/// Repeats the ten-spectra estimate with independent noise; trial `k` draws
/// from ChaCha8 stream `k` of `seed`, so results do not depend on scheduling.
pub fn noisy_ch(rho: &DensityOperator, setup: &ReadoutSetup, sigma: f64, trials: usize, seed: u64) -> Result<NoisyCh> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidArgument("noise sigma must be nonnegative".into()));
    }
    let spectra = synthesize_spectra(rho, &reference_ground(rho)?, setup)?;
    let mut values = Vec::with_capacity(trials);
    let mut sums = [[0.0; 4]; 4];
    for k in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let r = spectra.estimate(sigma, Some(&mut rng))?;
        values.push(r.ch.expect("all combos present"));
        for (s, e) in sums.iter_mut().zip(&r.entries) {
            for (a, p) in s.iter_mut().zip(e.probabilities) {
                *a += p;
            }
        }
    }
    let n = trials as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if trials > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    let mean_table =
        Combo::ALL.iter().zip(sums).map(|(&combo, s)| HardyEntry { combo, probabilities: s.map(|x| x / n) }).collect();
    Ok(NoisyCh { sigma, trials, seed, mean, std_dev: var.sqrt(), mean_table })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLES: [[f64; 4]; 4] =
        [[0.25, 0.375, 0.375, 0.0], [0.0, 0.625, 0.225, 0.15], [0.0, 0.225, 0.625, 0.15], [0.09, 0.135, 0.135, 0.64]];

    #[test]
    fn angles() {
        assert!((zeta() + theta() - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn pure_tables() {
        let r = hardy_table(&mermin_state().unwrap()).unwrap();
        for (e, want) in r.entries.iter().zip(TABLES) {
            for (g, w) in e.probabilities.iter().zip(want) {
                assert!((g - w).abs() < 1e-12, "{}: {:?}", e.combo, e.probabilities);
            }
        }
        assert!((r.ch.unwrap() + 0.09).abs() < 1e-12);
    }

    #[test]
    fn pseudo_pure_tables_match() {
        let a = hardy_table(&mermin_state().unwrap()).unwrap();
        let b = hardy_table(&mermin_pseudo_pure().unwrap()).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            for (p, q) in x.probabilities.iter().zip(y.probabilities) {
                assert!((p - q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_readout_matches_direct() {
        let setup = ReadoutSetup::default();
        for rho in [mermin_state().unwrap(), mermin_pseudo_pure().unwrap()] {
            for c in Combo::ALL {
                let a = run_combo(&rho, c).unwrap();
                let b = readout_protocol(&rho, c, &setup).unwrap();
                for (p, q) in a.probabilities.iter().zip(b.probabilities) {
                    assert!((p - q).abs() < 1e-10, "{c}");
                }
            }
        }
    }

    #[test]
    fn missing_combo() {
        let r = hardy_table(&mermin_state().unwrap()).unwrap();
        assert!(matches!(ch_value(&r.entries[..3]), Err(Error::MissingCombo(_))));
    }

    #[test]
    fn combo_parse() {
        assert_eq!("ab".parse::<Combo>().unwrap(), Combo(MeasurementBasis::A, MeasurementBasis::B));
        assert!("AC".parse::<Combo>().is_err());
    }
}

#[cfg(test)]
mod noise_tests {
    use super::*;

    #[test]
    fn noisy_estimate_statistics() {
        let r = noisy_ch(&mermin_pseudo_pure().unwrap(), &ReadoutSetup::default(), 0.0065, 1000, 7).unwrap();
        assert!((r.mean + 0.09).abs() < 0.005, "{}", r.mean);
        assert!((r.std_dev - 0.013).abs() < 0.3 * 0.013, "{}", r.std_dev);
        let again = noisy_ch(&mermin_pseudo_pure().unwrap(), &ReadoutSetup::default(), 0.0065, 1000, 7).unwrap();
        assert_eq!(r, again);
    }
}
