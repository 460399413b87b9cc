//! Three-spin phase-error correcting code.
//!
//! Spin 0 carries the data, spins 1 and 2 are ancillae. Encoding is
//! `R₉₀ · S^{3|1} · S^{2|1}` with `R₉₀ = exp(−i(π/2) Σ Iy)`; decoding applies
//! the inverses in reverse order; correction is the Toffoli gate flipping the
//! data spin when both ancillae read |1⟩.

mod fit;

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use fit::{fit_decay, DecayFit};

use crate::decoherence::{dephase, phase_kick, DephasingKind, DephasingModel};
use crate::error::{Error, Result};
use crate::pauli::{PauliLabel, SpinOperator, Symbol};
use crate::pulse::{cnot_unitary, toffoli};
use crate::state_prep::qec_input_states;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QecInput {
    #[serde(rename = "id")]
    Identity,
    Ix,
    Iy,
    Iz,
}

impl QecInput {
    pub const ALL: [QecInput; 4] = [QecInput::Identity, QecInput::Ix, QecInput::Iy, QecInput::Iz];

    /// `ρ_A = ρ_A¹ E₊²E₊³`.
    pub fn state(self) -> SpinOperator {
        let [id, x, y, z] = qec_input_states();
        match self {
            QecInput::Identity => id,
            QecInput::Ix => x,
            QecInput::Iy => y,
            QecInput::Iz => z,
        }
    }

    /// The one-spin data operator `ρ_A¹`.
    pub fn data_operator(self) -> SpinOperator {
        match self {
            QecInput::Identity => SpinOperator::identity(1),
            QecInput::Ix => SpinOperator::ix(1, 0),
            QecInput::Iy => SpinOperator::iy(1, 0),
            QecInput::Iz => SpinOperator::iz(1, 0),
        }
    }

    fn label(self) -> PauliLabel {
        let sym = match self {
            QecInput::Identity => Symbol::One,
            QecInput::Ix => Symbol::X,
            QecInput::Iy => Symbol::Y,
            QecInput::Iz => Symbol::Z,
        };
        PauliLabel::IDENTITY.with_symbol(0, sym)
    }

    pub fn name(self) -> &'static str {
        match self {
            QecInput::Identity => "id",
            QecInput::Ix => "ix",
            QecInput::Iy => "iy",
            QecInput::Iz => "iz",
        }
    }
}

impl FromStr for QecInput {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        QecInput::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| Error::Unknown { kind: "qec input", name: s.to_string() })
    }
}

fn check_three(rho: &SpinOperator) -> Result<()> {
    if rho.n() != 3 {
        return Err(Error::DimensionMismatch(3, rho.n()));
    }
    Ok(())
}

fn r90_generator() -> SpinOperator {
    SpinOperator::iy(3, 0) + SpinOperator::iy(3, 1) + SpinOperator::iy(3, 2)
}

pub fn encode(rho: &SpinOperator) -> Result<SpinOperator> {
    check_three(rho)?;
    rho.unitary_conjugate(&cnot_unitary(3, 0, 1)?)?
        .unitary_conjugate(&cnot_unitary(3, 0, 2)?)?
        .conjugate(&r90_generator(), PI / 2.0)
}

pub fn decode(rho: &SpinOperator) -> Result<SpinOperator> {
    check_three(rho)?;
    rho.conjugate(&r90_generator(), -PI / 2.0)?
        .unitary_conjugate(&cnot_unitary(3, 0, 2)?)?
        .unitary_conjugate(&cnot_unitary(3, 0, 1)?)
}

/// Conjugation by the Toffoli gate `T^{1|23}`.
pub fn correct(rho: &SpinOperator) -> Result<SpinOperator> {
    check_three(rho)?;
    rho.unitary_conjugate(&toffoli(3, 0, [1, 2])?)
}

/// `ρ_B` (encoded), `ρ_C` (dephased), `ρ_D` (decoded) and the corrected data spin `ρ_E¹`.
#[derive(Clone, Debug)]
pub struct Intermediates {
    pub b: SpinOperator,
    pub c: SpinOperator,
    pub d: SpinOperator,
    pub e: SpinOperator,
}

pub fn intermediate_states(rho_a: &SpinOperator, model: &DephasingModel, t: f64) -> Result<Intermediates> {
    let b = encode(rho_a)?;
    let c = dephase(&b, model, t)?;
    let d = decode(&c)?;
    let e = correct(&d)?.partial_trace(&[0])?;
    Ok(Intermediates { b, c, d, e })
}

/// Data-spin operator after encode, dephase, decode, correct and tracing the ancillae.
pub fn pipeline(rho_a: &SpinOperator, model: &DephasingModel, t: f64) -> Result<SpinOperator> {
    Ok(intermediate_states(rho_a, model, t)?.e)
}

/// Same as [`pipeline`] without the Toffoli correction.
pub fn pipeline_uncorrected(rho_a: &SpinOperator, model: &DephasingModel, t: f64) -> Result<SpinOperator> {
    decode(&dephase(&encode(rho_a)?, model, t)?)?.partial_trace(&[0])
}

/// Data-spin result of a phase kick `exp(−iΣχᵏIzᵏ)` on the encoded state.
pub fn pipeline_kicked(rho_a: &SpinOperator, chi: &[f64; 3]) -> Result<SpinOperator> {
    correct(&decode(&phase_kick(&encode(rho_a)?, chi)?)?)?.partial_trace(&[0])
}

/// Coefficient of the input's own product operator in a data-spin result.
pub fn data_coefficient(input: QecInput, data: &SpinOperator) -> f64 {
    data.coeff(input.label()).re
}

/// Closed-form data-spin coefficient at `x = t/τ`.
pub fn analytic_coefficient(input: QecInput, kind: DephasingKind, x: f64) -> f64 {
    match input {
        QecInput::Identity | QecInput::Ix => 1.0,
        QecInput::Iy | QecInput::Iz => match kind {
            DephasingKind::Uncorrelated => 1.5 * (-x).exp() - 0.5 * (-3.0 * x).exp(),
            DephasingKind::TotallyCorrelated => 1.125 * (-x).exp() - 0.125 * (-9.0 * x).exp(),
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QecPoint {
    pub t_over_tau: f64,
    pub coefficient: f64,
    pub analytic: f64,
}

/// Pipeline coefficients on `steps + 1` evenly spaced points of `[0, tmax]` (units of τ).
/// Without correction the analytic column still holds the corrected closed form.
pub fn run_curve(
    input: QecInput,
    kind: DephasingKind,
    tmax: f64,
    steps: usize,
    correct: bool,
) -> Result<Vec<QecPoint>> {
    if !(tmax.is_finite() && tmax >= 0.0) {
        return Err(Error::NegativeTime(tmax));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be positive".into()));
    }
    let model = DephasingModel::new(kind, 1.0)?;
    let rho = input.state();
    (0..=steps)
        .map(|i| {
            let x = tmax * i as f64 / steps as f64;
            let data = if correct { pipeline(&rho, &model, x)? } else { pipeline_uncorrected(&rho, &model, x)? };
            Ok(QecPoint {
                t_over_tau: x,
                coefficient: data_coefficient(input, &data),
                analytic: analytic_coefficient(input, kind, x),
            })
        })
        .collect()
}
