//! Pure z-dephasing channels acting term by term in the spherical basis.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Basis, PauliLabel, SpinOperator, Symbol};
use crate::pulse::coherence_order;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DephasingKind {
    /// Independent field fluctuations at each spin.
    Uncorrelated,
    /// One common field fluctuation seen by every spin.
    TotallyCorrelated,
}

impl std::str::FromStr for DephasingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unc" | "uncorrelated" => Ok(DephasingKind::Uncorrelated),
            "corr" | "correlated" => Ok(DephasingKind::TotallyCorrelated),
            _ => Err(Error::Unknown { kind: "dephasing model", name: s.to_string() }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DephasingModel {
    pub kind: DephasingKind,
    /// Decay time of a single-spin single-quantum coherence, in seconds.
    pub tau: f64,
}

impl DephasingModel {
    pub fn new(kind: DephasingKind, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
        }
        Ok(DephasingModel { kind, tau })
    }

    pub fn uncorrelated(tau: f64) -> Result<Self> {
        Self::new(DephasingKind::Uncorrelated, tau)
    }

    pub fn correlated(tau: f64) -> Result<Self> {
        Self::new(DephasingKind::TotallyCorrelated, tau)
    }
}

/// Transverse content of a spherical product operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoherenceClass {
    pub symbols: Vec<Symbol>,
    /// Number of I± factors.
    pub n_transverse: u32,
    /// Net coherence order: #I+ minus #I-.
    pub net_order: i32,
}

impl CoherenceClass {
    /// Decay rate in units of 1/τ.
    pub fn rate(&self, kind: DephasingKind) -> f64 {
        match kind {
            DephasingKind::Uncorrelated => f64::from(self.n_transverse),
            DephasingKind::TotallyCorrelated => f64::from(self.net_order * self.net_order),
        }
    }
}

impl fmt::Display for CoherenceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.symbols.iter().map(|s| s.as_char()).collect();
        write!(f, "{s} (n={}, p={})", self.n_transverse, self.net_order)
    }
}

/// Classifies a label read in the spherical basis.
pub fn classify(label: PauliLabel, n: usize) -> CoherenceClass {
    CoherenceClass {
        symbols: (0..n).map(|k| label.symbol(k, Basis::Spherical)).collect(),
        n_transverse: label.transverse().count_ones(),
        net_order: coherence_order(label),
    }
}

/// Decay rate of `class` under `model`, in units of 1/τ.
pub fn rate(class: &CoherenceClass, model: &DephasingModel) -> f64 {
    class.rate(model.kind)
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// Damps every spherical term by `exp(−rate · t/τ)`; returns the result in the input basis.
pub fn dephase(rho: &SpinOperator, model: &DephasingModel, t: f64) -> Result<SpinOperator> {
    check_time(t)?;
    let x = t / model.tau;
    let sph = rho.to_spherical();
    let damped = sph.terms().map(|(l, v)| {
        let r = classify(l, rho.n()).rate(model.kind);
        (l, v * (-r * x).exp())
    });
    Ok(SpinOperator::from_label_map(rho.n(), Basis::Spherical, damped).with_eps(rho.eps()).in_basis(rho.basis()))
}

/// Conjugation by `exp(−i Σ χᵏ Izᵏ)`.
pub fn phase_kick(rho: &SpinOperator, chi: &[f64]) -> Result<SpinOperator> {
    if chi.len() != rho.n() {
        return Err(Error::DimensionMismatch(rho.n(), chi.len()));
    }
    let mut g = SpinOperator::zero(rho.n());
    for (k, &c) in chi.iter().enumerate() {
        if c != 0.0 {
            g += &(SpinOperator::iz(rho.n(), k) * c);
        }
    }
    rho.conjugate(&g, 1.0)
}

/// Echo amplitude `exp(−p² t/τ)` after diffusion in a gradient.
pub fn gradient_echo_attenuation(p: i32, t: f64, tau: f64) -> Result<f64> {
    check_time(t)?;
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    Ok((-f64::from(p * p) * t / tau).exp())
}

/// Coefficientwise sample mean and standard error of a Monte Carlo average.
#[derive(Clone, Debug)]
pub struct MonteCarloEstimate {
    pub mean: SpinOperator,
    /// Standard errors of the real and imaginary parts, stored as re/im of each coefficient.
    pub std_error: SpinOperator,
    pub samples: usize,
}

const SHARD: usize = 10_000;

/// Averages [`phase_kick`] over Gaussian angles of variance `2t/τ`, which is
/// the noise strength reproducing [`dephase`]. Uncorrelated draws one angle
/// per spin, totally correlated one angle for all spins. Samples are drawn in
/// shards of 10⁴, shard `k` using ChaCha8 stream `k` of `seed`.
pub fn monte_carlo_dephase(
    rho: &SpinOperator,
    model: &DephasingModel,
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    check_time(t)?;
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let n = rho.n();
    let sigma = (2.0 * t / model.tau).sqrt();
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let base = rho.to_spherical();
    let labels: Vec<PauliLabel> = base.terms().map(|(l, _)| l).collect();
    let mut sum = vec![Complex64::default(); labels.len()];
    let mut sum_sq = vec![(0.0f64, 0.0f64); labels.len()];
    let mut chi = vec![0.0; n];
    let mut done = 0usize;
    let mut shard = 0u64;
    while done < samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shard);
        let count = SHARD.min(samples - done);
        for _ in 0..count {
            match model.kind {
                DephasingKind::Uncorrelated => chi.iter_mut().for_each(|c| *c = normal.sample(&mut rng)),
                DephasingKind::TotallyCorrelated => {
                    let c = normal.sample(&mut rng);
                    chi.iter_mut().for_each(|x| *x = c);
                }
            }
            let kicked = phase_kick(&base, &chi)?.to_spherical();
            for (i, l) in labels.iter().enumerate() {
                let v = kicked.coeff(*l);
                sum[i] += v;
                sum_sq[i].0 += v.re * v.re;
                sum_sq[i].1 += v.im * v.im;
            }
        }
        done += count;
        shard += 1;
    }
    let m = samples as f64;
    let mean = labels.iter().zip(&sum).map(|(l, s)| (*l, s / m));
    let se = labels.iter().zip(sum.iter().zip(&sum_sq)).map(|(l, (s, sq))| {
        let var = |sq: f64, mu: f64| ((sq / m - mu * mu).max(0.0) * m / (m - 1.0) / m).sqrt();
        (*l, Complex64::new(var(sq.0, s.re / m), var(sq.1, s.im / m)))
    });
    Ok(MonteCarloEstimate {
        mean: SpinOperator::from_label_map(n, Basis::Spherical, mean),
        std_error: SpinOperator::from_label_map(n, Basis::Spherical, se).with_eps(0.0),
        samples,
    })
}
