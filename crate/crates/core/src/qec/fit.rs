use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use varpro::prelude::*;
use varpro::problem::SeparableProblemBuilder;
use varpro::solvers::levmar::LevMarSolver;

use crate::error::{Error, Result};

/// Sum-of-exponentials fit `y(t) = Σ cₖ exp(−rₖ t)`, rates ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub coefficients: Vec<f64>,
    pub rates: Vec<f64>,
    /// Root-mean-square residual.
    pub residual: f64,
}

impl DecayFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.coefficients.iter().zip(&self.rates).map(|(c, r)| c * (-r * t).exp()).sum()
    }
}

fn decay(t: &DVector<f64>, r: f64) -> DVector<f64> {
    t.map(|x| (-r * x).exp())
}

fn decay_dr(t: &DVector<f64>, r: f64) -> DVector<f64> {
    t.map(|x| -x * (-r * x).exp())
}

fn solve(t: &DVector<f64>, y: &DVector<f64>, start: &[f64]) -> Option<DecayFit> {
    let names: Vec<String> = (0..start.len()).map(|k| format!("r{k}")).collect();
    let mut builder = SeparableModelBuilder::<f64>::new(&names);
    for name in &names {
        builder = builder.function(std::slice::from_ref(name), decay).partial_deriv(name, decay_dr);
    }
    let model = builder.independent_variable(t.clone()).initial_parameters(start.to_vec()).build().ok()?;
    let problem = SeparableProblemBuilder::new(model).observations(y.clone()).build().ok()?;
    let fit = LevMarSolver::default().solve(problem).ok()?;
    let rates: Vec<f64> = fit.nonlinear_parameters().iter().copied().collect();
    let coefficients: Vec<f64> = fit.linear_coefficients()?.iter().copied().collect();
    if rates.iter().chain(&coefficients).any(|v| !v.is_finite()) {
        return None;
    }
    let mut pairs: Vec<(f64, f64)> = rates.into_iter().zip(coefficients).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = DecayFit {
        rates: pairs.iter().map(|p| p.0).collect(),
        coefficients: pairs.iter().map(|p| p.1).collect(),
        residual: 0.0,
    };
    let ss: f64 = t.iter().zip(y.iter()).map(|(x, v)| (out.eval(*x) - v).powi(2)).sum();
    out.residual = (ss / t.len() as f64).sqrt();
    Some(out)
}

/// Nonlinear least-squares fit of `n_exp` decaying exponentials by variable
/// projection. Several starting rate sets are tried and the best residual kept.
pub fn fit_decay(series: &[(f64, f64)], n_exp: usize) -> Result<DecayFit> {
    if n_exp == 0 {
        return Err(Error::InvalidArgument("n_exp must be positive".into()));
    }
    if series.len() < 2 * n_exp {
        return Err(Error::InvalidArgument(format!("{} points cannot determine {n_exp} exponentials", series.len())));
    }
    if series.iter().any(|(t, y)| !t.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidArgument("series contains non-finite values".into()));
    }
    let t = DVector::from_iterator(series.len(), series.iter().map(|p| p.0));
    let y = DVector::from_iterator(series.len(), series.iter().map(|p| p.1));
    let span = (t.max() - t.min()).max(f64::MIN_POSITIVE);
    let mut best: Option<DecayFit> = None;
    for base in [0.5, 2.0, 8.0] {
        let start: Vec<f64> = (0..n_exp).map(|k| base * 3f64.powi(k as i32) / span).collect();
        if let Some(f) = solve(&t, &y, &start) {
            if best.as_ref().is_none_or(|b| f.residual < b.residual) {
                best = Some(f);
            }
        }
    }
    best.ok_or_else(|| Error::Fit("no starting point converged".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(f: impl Fn(f64) -> f64, tmax: f64, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let t = tmax * i as f64 / (n - 1) as f64;
                (t, f(t))
            })
            .collect()
    }

    #[test]
    fn recovers_two_exponentials() {
        let s = sample(|x| 1.5 * (-x).exp() - 0.5 * (-3.0 * x).exp(), 3.0, 64);
        let f = fit_decay(&s, 2).unwrap();
        assert!((f.rates[0] - 1.0).abs() < 1e-6, "{f:?}");
        assert!((f.rates[1] - 3.0).abs() < 1e-6, "{f:?}");
        assert!((f.coefficients[0] - 1.5).abs() < 1e-6, "{f:?}");
        assert!((f.coefficients[1] + 0.5).abs() < 1e-6, "{f:?}");
    }

    #[test]
    fn recovers_fast_rate() {
        let s = sample(|x| (-9.0 * x).exp(), 1.0, 40);
        let f = fit_decay(&s, 1).unwrap();
        assert!((f.rates[0] - 9.0).abs() < 1e-6, "{f:?}");
    }

    #[test]
    fn constant_series_has_zero_rate() {
        let s = sample(|_| 0.7, 2.0, 20);
        let f = fit_decay(&s, 1).unwrap();
        assert!(f.rates[0].abs() < 1e-6, "{f:?}");
        assert!((f.coefficients[0] - 0.7).abs() < 1e-6);
    }

    #[test]
    fn too_few_points() {
        assert!(fit_decay(&[(0.0, 1.0), (1.0, 0.5), (2.0, 0.2)], 2).is_err());
    }
}
