//! Equilibrium, pseudo-pure, conditional and relative pseudo-pure states.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{dense, DensityOperator, Form, SpinOperator};
use crate::pulse::{crusher, Axis, PulseSequence};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumParams {
    pub n: usize,
    /// Relative Zeeman frequencies; 1 for a homonuclear system.
    pub weights: Vec<f64>,
    /// Energy ratio used by the exact Boltzmann mode. A single spin has
    /// populations proportional to `exp(±ratio·w)`.
    pub ratio: f64,
}

impl EquilibriumParams {
    pub fn homonuclear(n: usize) -> Self {
        EquilibriumParams { n, weights: vec![1.0; n], ratio: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > crate::pauli::MAX_SPINS {
            return Err(Error::SpinCount(self.n));
        }
        if self.weights.len() != self.n || self.weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidArgument("need one positive weight per spin".into()));
        }
        if !(self.ratio.is_finite() && self.ratio >= 0.0) {
            return Err(Error::InvalidArgument("ratio must be nonnegative".into()));
        }
        Ok(())
    }
}

/// High-temperature equilibrium `(1 + Σ wₙ Izⁿ) / 2^N`.
///
/// Only the traceless part carries the physical scaling (the Boltzmann factor
/// is set to one), so for N ≥ 3 the full form is not positive.
pub fn equilibrium(params: &EquilibriumParams) -> Result<DensityOperator> {
    params.validate()?;
    let n = params.n;
    let scale = 2f64.powi(-(n as i32));
    let mut op = SpinOperator::scalar(n, re(scale));
    for (k, w) in params.weights.iter().enumerate() {
        op += &(SpinOperator::iz(n, k) * (w * scale));
    }
    DensityOperator::new(op, Form::Full)
}

/// Traceless high-temperature equilibrium of `n` equivalent spins.
pub fn equilibrium_hat(n: usize) -> Result<DensityOperator> {
    Ok(equilibrium(&EquilibriumParams::homonuclear(n))?.hat())
}

/// Exact Boltzmann populations (computational basis order, spin 1 most significant).
pub fn boltzmann_populations(params: &EquilibriumParams) -> Result<Vec<f64>> {
    params.validate()?;
    if params.n > 30 {
        return Err(Error::DenseLimit { n: params.n, limit: 30 });
    }
    let n = params.n;
    let logs: Vec<f64> = (0..1usize << n)
        .map(|idx| {
            (0..n)
                .map(|k| {
                    let s = if (idx >> (n - 1 - k)) & 1 == 0 { 1.0 } else { -1.0 };
                    s * params.ratio * params.weights[k]
                })
                .sum()
        })
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / z).collect())
}

/// Exact Boltzmann equilibrium as a full-form density operator.
pub fn equilibrium_exact(params: &EquilibriumParams) -> Result<DensityOperator> {
    let pops = boltzmann_populations(params)?;
    let diag: Vec<Complex64> = pops.into_iter().map(re).collect();
    DensityOperator::new(SpinOperator::from_diagonal(&diag)?, Form::Full)
}

fn check_normalized(psi: &[Complex64]) -> Result<usize> {
    let dim = psi.len();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("state vector length {dim} is not a power of two")));
    }
    let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Unnormalized(norm));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Prefactor `(N/2)/(2^N − 1)` that matches the largest equilibrium eigenvalue.
pub fn pseudo_pure_prefactor(n: usize) -> f64 {
    (n as f64 / 2.0) / (2f64.powi(n as i32) - 1.0)
}

/// Traceless pseudo-pure state `(N/2)/(2^N−1) · (|ψ⟩⟨ψ| − 2^{−N})`.
pub fn pseudo_pure(psi: &[Complex64]) -> Result<DensityOperator> {
    let n = check_normalized(psi)?;
    let v = dense::Matrix::from_column_slice(psi.len(), 1, psi);
    let proj = SpinOperator::from_dense(&(&v * v.adjoint()), n)?;
    scale_projector(proj, n)
}

/// Pseudo-pure state of the computational basis state `index`; works beyond the dense limit.
pub fn pseudo_pure_basis(n: usize, index: u64) -> Result<DensityOperator> {
    if n == 0 || n > crate::pauli::MAX_SPINS {
        return Err(Error::SpinCount(n));
    }
    if n < 64 && index >> n != 0 {
        return Err(Error::InvalidArgument(format!("basis index {index} out of range")));
    }
    let mut proj = SpinOperator::identity(n);
    for k in 0..n {
        let e = if (index >> (n - 1 - k)) & 1 == 0 { SpinOperator::e_plus(n, k) } else { SpinOperator::e_minus(n, k) };
        proj = proj * e;
    }
    scale_projector(proj, n)
}

fn scale_projector(proj: SpinOperator, n: usize) -> Result<DensityOperator> {
    let k = pseudo_pure_prefactor(n);
    let hat = (proj - SpinOperator::scalar(n, re(2f64.powi(-(n as i32))))) * k;
    DensityOperator::traceless(&hat)
}

/// Arithmetic mean of states with the same spin count and form.
pub fn temporal_average(states: &[DensityOperator]) -> Result<DensityOperator> {
    let first = states.first().ok_or_else(|| Error::InvalidArgument("nothing to average".into()))?;
    let mut sum = SpinOperator::zero(first.n());
    for s in states {
        if s.n() != first.n() {
            return Err(Error::DimensionMismatch(first.n(), s.n()));
        }
        if s.form() != first.form() {
            return Err(Error::InvalidArgument("mixed full and traceless forms".into()));
        }
        if !s.is_diagonal() {
            return Err(Error::NotDiagonal);
        }
        sum += s.op();
    }
    DensityOperator::new(sum * (1.0 / states.len() as f64), first.form())
}

/// Reorders the diagonal: entry `i` of the result is entry `perm[i]` of `rho`.
pub fn permute_diagonal(rho: &DensityOperator, perm: &[usize]) -> Result<DensityOperator> {
    if !rho.is_diagonal() {
        return Err(Error::NotDiagonal);
    }
    let diag = rho.diagonal()?;
    if perm.len() != diag.len() {
        return Err(Error::InvalidPermutation(format!("length {} for {} entries", perm.len(), diag.len())));
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(format!("index {p} repeated or out of range")));
        }
    }
    let out: Vec<Complex64> = perm.iter().map(|&p| diag[p]).collect();
    DensityOperator::new(SpinOperator::from_diagonal(&out)?, rho.form())
}

/// Cyclic shift by `shift` of the 2^N − 1 entries after the ground state.
pub fn cyclic_permutation(n: usize, shift: usize) -> Vec<usize> {
    let m = (1usize << n) - 1;
    std::iter::once(0).chain((0..m).map(|i| 1 + (i + shift) % m)).collect()
}

/// Average of `rho` over all 2^N − 1 cyclic shifts of the nonground populations.
pub fn cyclic_average(rho: &DensityOperator) -> Result<DensityOperator> {
    let m = (1usize << rho.n()) - 1;
    let states = (0..m).map(|s| permute_diagonal(rho, &cyclic_permutation(rho.n(), s))).collect::<Result<Vec<_>>>()?;
    temporal_average(&states)
}

/// Permutation taking `source` to `target` (entrywise, values matched to 1e-12).
/// Ties are resolved in index order.
pub fn matching_permutation(source: &[f64], target: &[f64]) -> Result<Vec<usize>> {
    if source.len() != target.len() {
        return Err(Error::InvalidPermutation("length mismatch".into()));
    }
    let mut used = vec![false; source.len()];
    target
        .iter()
        .map(|t| {
            let j = (0..source.len())
                .find(|&j| !used[j] && (source[j] - t).abs() < 1e-12)
                .ok_or_else(|| Error::InvalidPermutation(format!("value {t} not available")))?;
            used[j] = true;
            Ok(j)
        })
        .collect()
}

/// Conditional pseudo-pure diagonal (×16), spin 1 polarized along ±z.
pub const CONDPURE3A_X16: [f64; 8] = [3.0, -1.0, -1.0, -1.0, -3.0, 1.0, 1.0, 1.0];
/// Companion diagonal (×16) used when averaging the error-correction input.
pub const CONDPURE3B_X16: [f64; 8] = [3.0, 1.0, 1.0, 1.0, -3.0, -1.0, -1.0, -1.0];
/// Four-spin relative pseudo-pure diagonal (×32).
pub const RELPURE4_X32: [f64; 16] =
    [4.0, 2.0, 2.0, 0.0, 2.0, 0.0, -2.0, 0.0, 0.0, -2.0, 0.0, 2.0, 0.0, -2.0, -2.0, -4.0];
/// Six-spin relative pseudo-pure diagonal (×128).
pub const RELPURE6_X128: [f64; 64] = [
    6.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, //
    0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -2.0, -2.0, -2.0, -2.0, -4.0, -4.0, //
    0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -2.0, -2.0, -2.0, -2.0, -4.0, -4.0, //
    2.0, 2.0, 2.0, 2.0, 2.0, 2.0, -2.0, -2.0, -2.0, -2.0, -2.0, -2.0, -2.0, -4.0, -4.0, -6.0,
];

/// Permutes the N-spin equilibrium diagonal into `target / scale`.
pub fn equilibrium_permuted_to(n: usize, target: &[f64], scale: f64) -> Result<(Vec<usize>, DensityOperator)> {
    let eq = equilibrium_hat(n)?;
    let src: Vec<f64> = eq.diagonal()?.iter().map(|v| v.re * scale).collect();
    let perm = matching_permutation(&src, target)?;
    let out = permute_diagonal(&eq, &perm)?;
    Ok((perm, out))
}

/// Three-spin conditional pseudo-pure state `¼(E₊¹ − E₋¹)(E₊²E₊³ − ¼)`.
pub fn conditional_pure_3() -> Result<DensityOperator> {
    Ok(equilibrium_permuted_to(3, &CONDPURE3A_X16, 16.0)?.1)
}

/// Companion state with spin 1 reversed relative to the ancilla pattern.
pub fn conditional_pure_3b() -> Result<DensityOperator> {
    Ok(equilibrium_permuted_to(3, &CONDPURE3B_X16, 16.0)?.1)
}

/// Four-spin relative pseudo-pure state; spins 3 and 4 reduce to `¼(E₊³E₊⁴ − ¼)`.
pub fn relative_pure_4() -> Result<DensityOperator> {
    Ok(equilibrium_permuted_to(4, &RELPURE4_X32, 32.0)?.1)
}

#[derive(Clone, Debug)]
pub struct RelPure6Check {
    pub state: DensityOperator,
    /// Diagonal after tracing spins 3–6, in units of 1/128.
    pub block_sums: [f64; 4],
    /// Diagonal after tracing spins 2–6, in units of 1/128.
    pub reduced: [f64; 2],
    /// The single-spin operator left at the end.
    pub spin1: SpinOperator,
}

/// Six-spin relative pseudo-pure diagonal reduced step by step to spin 1.
pub fn relative_pure_6spin_check() -> Result<RelPure6Check> {
    let (_, state) = equilibrium_permuted_to(6, &RELPURE6_X128, 128.0)?;
    let two = state.partial_trace(&[0, 1])?;
    let d2 = two.diagonal()?;
    let one = two.partial_trace(&[0])?;
    let d1 = one.diagonal()?;
    Ok(RelPure6Check {
        state,
        block_sums: [d2[0].re * 128.0, d2[1].re * 128.0, d2[2].re * 128.0, d2[3].re * 128.0],
        reduced: [d1[0].re * 128.0, d1[1].re * 128.0],
        spin1: one,
    })
}

/// The three-event preparation `[π/4(Ix¹+Ix²)] → [πIz¹Iz²] → [−π/6(Iy¹+Iy²)]`
/// and the crushed result on the two-spin equilibrium.
pub fn gradient_prep_2spin() -> Result<(PulseSequence, DensityOperator)> {
    let seq =
        PulseSequence::new(2).rotate(PI / 4.0, Axis::X, &[0, 1])?.zz(PI, 0, 1)?.rotate(-PI / 6.0, Axis::Y, &[0, 1])?;
    let pre = seq.apply(equilibrium_hat(2)?.op())?;
    let out = crusher(&pre, false);
    Ok((seq, DensityOperator::traceless(&out)?))
}

/// The four error-correction inputs `{1, Ix¹, Iy¹, Iz¹}·E₊²E₊³`.
pub fn qec_input_states() -> [SpinOperator; 4] {
    let anc = SpinOperator::e_plus(3, 1) * SpinOperator::e_plus(3, 2);
    [anc.clone(), SpinOperator::ix(3, 0) * &anc, SpinOperator::iy(3, 0) * &anc, SpinOperator::iz(3, 0) * &anc]
}

/// Mean of the two conditional pseudo-pure states, which equals `(3/8) Iz¹E₊²E₊³`.
pub fn qec_averaged_preparation() -> Result<DensityOperator> {
    temporal_average(&[conditional_pure_3()?, conditional_pure_3b()?])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrMethod {
    /// One experiment of the cyclic temporal average.
    Cyclic,
    /// Cyclic average credited with the √(2^N − 1) gain of repeated scans.
    CyclicAvg,
    /// Three-spin conditional state, E₊ subpopulation of spin 1.
    Conditional,
    /// Four-spin relative state, spins 3 and 4.
    Relative,
}

impl FromStr for SnrMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cyclic" => Ok(SnrMethod::Cyclic),
            "cyclic-avg" => Ok(SnrMethod::CyclicAvg),
            "conditional" => Ok(SnrMethod::Conditional),
            "relative" => Ok(SnrMethod::Relative),
            _ => Err(Error::Unknown { kind: "snr method", name: s.to_string() }),
        }
    }
}

/// Signal strength of a preparation: the largest eigenvalue of the reduced
/// one-spin state, absolute and relative to the one-spin equilibrium value ¼.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snr {
    pub absolute: f64,
    pub relative: f64,
}

impl Snr {
    fn from_absolute(absolute: f64) -> Self {
        Snr { absolute, relative: absolute * 4.0 }
    }
}

fn max_eigenvalue_single(op: &SpinOperator) -> Result<f64> {
    let m = op.to_dense()?;
    Ok(*dense::hermitian_eigenvalues(&m).last().expect("nonempty"))
}

/// Constructs the preparation and measures it. `n` applies to the cyclic methods;
/// the conditional and relative methods have fixed sizes (3 and 4 spins).
pub fn snr(method: SnrMethod, n: usize) -> Result<Snr> {
    match method {
        SnrMethod::Cyclic | SnrMethod::CyclicAvg => {
            if n == 0 || n > dense::DEFAULT_DENSE_LIMIT {
                return Err(Error::SpinCount(n));
            }
            let avg = cyclic_average(&equilibrium_hat(n)?)?;
            let single = max_eigenvalue_single(&avg.partial_trace(&[0])?)?;
            let gain = if method == SnrMethod::CyclicAvg { (2f64.powi(n as i32) - 1.0).sqrt() } else { 1.0 };
            Ok(Snr::from_absolute(single * gain))
        }
        SnrMethod::Conditional => {
            let rho = conditional_pure_3()?;
            let sub = (SpinOperator::e_plus(3, 0) * rho.op()).partial_trace(&[1, 2])?;
            Ok(Snr::from_absolute(max_eigenvalue_single(&sub.partial_trace(&[0])?)?))
        }
        SnrMethod::Relative => {
            let rho = relative_pure_4()?;
            let pair = rho.partial_trace(&[2, 3])?;
            Ok(Snr::from_absolute(max_eigenvalue_single(&pair.partial_trace(&[0])?)?))
        }
    }
}

/// Closed-form cyclic SNR `N / (4(2^N − 1))`.
pub fn cyclic_snr_formula(n: usize) -> f64 {
    n as f64 / (4.0 * (2f64.powi(n as i32) - 1.0))
}

/// Closed-form averaged SNR `N / (4√(2^N − 1))`.
pub fn cyclic_avg_snr_formula(n: usize) -> f64 {
    n as f64 / (4.0 * (2f64.powi(n as i32) - 1.0).sqrt())
}

/// Polarization of the cyclic-average pseudo-pure state built from exact
/// Boltzmann populations.
///
/// Averaging the nonground populations leaves `(1 − P)/2^N + P|0…0⟩⟨0…0|`,
/// so `P = (2^N p₀ − 1)/(2^N − 1)` with `2^N p₀ = Π(1 + tanh(r wₙ))`.
pub fn polarization(weights: &[f64], ratio: f64) -> Result<f64> {
    let n = weights.len();
    if n == 0 || n > crate::pauli::MAX_SPINS {
        return Err(Error::SpinCount(n));
    }
    if !(ratio.is_finite() && ratio >= 0.0) || weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidArgument("ratio and weights must be nonnegative and finite".into()));
    }
    let log_sum: f64 = weights.iter().map(|w| (ratio * w).tanh().ln_1p()).sum();
    Ok(log_sum.exp_m1() / (2f64.powi(n as i32) - 1.0))
}

/// `(ratio, P)` for each ratio with homonuclear weights.
pub fn polarization_curve(n: usize, ratios: &[f64]) -> Result<Vec<(f64, f64)>> {
    let w = vec![1.0; n];
    ratios.iter().map(|&r| Ok((r, polarization(&w, r)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_x(op: &SpinOperator, scale: f64) -> Vec<f64> {
        op.diagonal().unwrap().iter().map(|v| v.re * scale).collect()
    }

    #[test]
    fn equilibrium_matrices() {
        assert_eq!(diag_x(&equilibrium_hat(1).unwrap(), 4.0), vec![1.0, -1.0]);
        assert_eq!(diag_x(&equilibrium_hat(2).unwrap(), 4.0), vec![1.0, 0.0, 0.0, -1.0]);
        assert_eq!(diag_x(&equilibrium_hat(3).unwrap(), 16.0), vec![3.0, 1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -3.0]);
    }

    #[test]
    fn two_spin_ground_pseudo_pure() {
        let pp = pseudo_pure_basis(2, 0).unwrap();
        assert_eq!(diag_x(&pp, 12.0).iter().map(|v| v.round()).collect::<Vec<_>>(), vec![3.0, -1.0, -1.0, -1.0]);
        let psi = [re(1.0), re(0.0), re(0.0), re(0.0)];
        assert!(pseudo_pure(&psi).unwrap().approx_eq(&pp, 1e-15));
        assert!(pseudo_pure(&[re(1.0), re(1.0)]).is_err());
    }

    #[test]
    fn cyclic_average_is_pseudo_pure() {
        for n in 1..=4 {
            let avg = cyclic_average(&equilibrium_hat(n).unwrap()).unwrap();
            assert!(avg.approx_eq(&pseudo_pure_basis(n, 0).unwrap(), 1e-15), "n={n}");
        }
    }

    #[test]
    fn permutation_errors() {
        let eq = equilibrium_hat(2).unwrap();
        assert!(permute_diagonal(&eq, &[0, 0, 1, 2]).is_err());
        assert!(permute_diagonal(&eq, &[0, 1, 2]).is_err());
        let x = DensityOperator::traceless(&SpinOperator::ix(2, 0)).unwrap();
        assert_eq!(permute_diagonal(&x, &[0, 1, 2, 3]), Err(Error::NotDiagonal));
    }

    #[test]
    fn polarization_limits() {
        assert!((polarization(&[1.0], 50.0).unwrap() - 1.0).abs() < 1e-15);
        let p = polarization(&[1.0], 1e-5).unwrap();
        assert!((p - 1e-5).abs() < 1e-7);
        assert!(polarization(&[1.0; 64], 1e-5).unwrap() > 0.0);
    }

    #[test]
    fn averaged_qec_input() {
        let avg = qec_averaged_preparation().unwrap();
        let want = SpinOperator::iz(3, 0) * SpinOperator::e_plus(3, 1) * SpinOperator::e_plus(3, 2) * 0.375;
        assert!(avg.op().approx_eq(&want, 1e-15));
    }
}
