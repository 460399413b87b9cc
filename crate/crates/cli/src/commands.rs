use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use spinops::decoherence::{dephase as apply_dephasing, DephasingKind, DephasingModel};
use spinops::hardy::{self, HardyEntry, ReadoutSetup};
use spinops::pauli::{dense, text};
use spinops::pulse::{cnot, cnot_unitary, not_gate, SpinSystem, SpinSystemFile};
use spinops::qec::{run_curve, QecInput};
use spinops::readout::{fid, spectrum as synth_spectrum, AcquisitionParams};
use spinops::state_prep::{self, SnrMethod};
use spinops::{DensityOperator, SpinOperator};

use crate::output::{self, Format};
use crate::OutArgs;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Operator file in the text format, or JSON when it starts with `{`.
fn read_operator(path: &Path) -> Result<SpinOperator> {
    let s = read(path)?;
    let op = if s.trim_start().starts_with('{') { text::from_json(&s) } else { text::from_text(&s) };
    op.with_context(|| format!("parsing operator in {}", path.display()))
}

fn read_system(path: &Path) -> Result<SpinSystem> {
    let f: SpinSystemFile =
        serde_json::from_str(&read(path)?).with_context(|| format!("parsing spin system in {}", path.display()))?;
    Ok(SpinSystem::from_file(&f)?)
}

fn operator_bytes(op: &SpinOperator, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Text => Ok(text::to_text(op).into_bytes()),
        Format::Json => Ok((text::to_json(op) + "\n").into_bytes()),
        Format::Csv => bail!("operators are written as text or json"),
    }
}

fn tabular<T: Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => output::csv(rows),
        Format::Json => output::json(rows),
        Format::Text => bail!("this command writes csv or json"),
    }
}

/// 1-based spin number from the command line.
fn spin(k: usize, n: usize) -> Result<usize> {
    ensure!(k >= 1 && k <= n, "spin {k} out of range 1..={n}");
    Ok(k - 1)
}

#[derive(Debug, Args)]
pub struct SnrArgs {
    #[arg(long, value_parser = parse_snr_method)]
    pub method: SnrMethod,
    /// Spin count (cyclic methods; the others have fixed size).
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

fn parse_snr_method(s: &str) -> std::result::Result<SnrMethod, String> {
    s.parse().map_err(|e: spinops::Error| e.to_string())
}

#[derive(Serialize)]
struct SnrRow {
    method: String,
    n: usize,
    absolute: f64,
    relative: f64,
    formula: Option<f64>,
}

pub fn snr(a: SnrArgs) -> Result<()> {
    let r = state_prep::snr(a.method, a.n)?;
    let (n, formula) = match a.method {
        SnrMethod::Cyclic => (a.n, Some(state_prep::cyclic_snr_formula(a.n))),
        SnrMethod::CyclicAvg => (a.n, Some(state_prep::cyclic_avg_snr_formula(a.n))),
        SnrMethod::Conditional => (3, None),
        SnrMethod::Relative => (4, None),
    };
    let row = SnrRow {
        method: serde_json::to_value(a.method)?.as_str().unwrap_or_default().to_string(),
        n,
        absolute: r.absolute,
        relative: r.relative,
        formula,
    };
    let bytes = tabular(&[row], a.out.format.unwrap_or(Format::Csv))?;
    output::emit(&bytes, a.out.out.as_deref())
}

#[derive(Debug, Args)]
pub struct PolarizationArgs {
    #[arg(long)]
    pub n: usize,
    /// File of Boltzmann ratios, separated by whitespace, commas or newlines.
    #[arg(long, conflicts_with = "ratio")]
    pub ratios: Option<PathBuf>,
    /// Ratios given inline.
    #[arg(long, value_delimiter = ',')]
    pub ratio: Vec<f64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Serialize)]
struct PolarizationRow {
    ratio: f64,
    #[serde(rename = "P")]
    p: f64,
    #[serde(rename = "-log10P")]
    neg_log10_p: f64,
}

pub fn polarization(a: PolarizationArgs) -> Result<()> {
    let ratios: Vec<f64> = match &a.ratios {
        Some(path) => read(path)?
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty() && !t.starts_with('#'))
            .map(|t| t.parse::<f64>().with_context(|| format!("bad ratio `{t}`")))
            .collect::<Result<_>>()?,
        None => a.ratio.clone(),
    };
    ensure!(!ratios.is_empty(), "no ratios given");
    let rows: Vec<PolarizationRow> = state_prep::polarization_curve(a.n, &ratios)?
        .into_iter()
        .map(|(ratio, p)| PolarizationRow { ratio, p, neg_log10_p: -p.log10() })
        .collect();
    let bytes = tabular(&rows, a.out.format.unwrap_or(Format::Csv))?;
    output::emit(&bytes, a.out.out.as_deref())
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Gate {
    Cnot,
    Not,
}

#[derive(Debug, Args)]
pub struct CompileGateArgs {
    #[arg(long, value_enum)]
    pub gate: Gate,
    #[arg(long)]
    pub target: usize,
    #[arg(long)]
    pub control: Option<usize>,
    /// Spin count; defaults to the largest spin named.
    #[arg(long)]
    pub n: Option<usize>,
    /// Report the deviation from the ideal unitary instead of the sequence.
    #[arg(long)]
    pub check: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Serialize)]
struct GateCheck {
    gate: String,
    n: usize,
    control: Option<usize>,
    target: usize,
    max_deviation: f64,
    phase_re: f64,
    phase_im: f64,
}

pub fn compile_gate(a: CompileGateArgs) -> Result<()> {
    let n = a.n.unwrap_or(a.target.max(a.control.unwrap_or(0)));
    let t = spin(a.target, n)?;
    let (seq, ideal) = match a.gate {
        Gate::Cnot => {
            let c = spin(a.control.context("c-NOT needs --control")?, n)?;
            (cnot(n, c, t)?, cnot_unitary(n, c, t)?)
        }
        Gate::Not => {
            ensure!(a.control.is_none(), "NOT takes no --control");
            // [π Ix] = −2i·Ix
            (not_gate(n, t)?, SpinOperator::ix(n, t) * 2.0)
        }
    };
    if !a.check {
        let format = a.out.format.unwrap_or(Format::Text);
        ensure!(format == Format::Text, "sequences are written as text");
        return output::emit(seq.to_text()?.as_bytes(), a.out.out.as_deref());
    }
    let u = seq.compile()?;
    let (dev, phase) = dense::deviation_up_to_phase(&u, &ideal.to_dense()?, 1e-9);
    let row = GateCheck {
        gate: format!("{:?}", a.gate).to_lowercase(),
        n,
        control: a.control,
        target: a.target,
        max_deviation: dev,
        phase_re: phase.re,
        phase_im: phase.im,
    };
    let bytes = tabular(&[row], a.out.format.unwrap_or(Format::Csv))?;
    output::emit(&bytes, a.out.out.as_deref())
}

fn parse_kind(s: &str) -> std::result::Result<DephasingKind, String> {
    s.parse().map_err(|e: spinops::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct DephaseArgs {
    /// unc or corr.
    #[arg(long, value_parser = parse_kind)]
    pub model: DephasingKind,
    #[arg(long)]
    pub t_over_tau: f64,
    /// Operator file (text format or JSON).
    #[arg(long)]
    pub state: PathBuf,
    #[command(flatten)]
    pub out: OutArgs,
}

pub fn dephase(a: DephaseArgs) -> Result<()> {
    let rho = read_operator(&a.state)?;
    let model = DephasingModel::new(a.model, 1.0)?;
    let out = apply_dephasing(&rho, &model, a.t_over_tau)?;
    let bytes = operator_bytes(&out, a.out.format.unwrap_or(Format::Text))?;
    output::emit(&bytes, a.out.out.as_deref())
}

fn parse_input(s: &str) -> std::result::Result<QecInput, String> {
    s.parse().map_err(|e: spinops::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct QecArgs {
    /// id, ix, iy or iz.
    #[arg(long, value_parser = parse_input)]
    pub input: QecInput,
    #[arg(long, value_parser = parse_kind)]
    pub model: DephasingKind,
    /// Largest t/τ.
    #[arg(long, default_value_t = 2.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 64)]
    pub steps: usize,
    /// Skip the Toffoli correction step.
    #[arg(long)]
    pub no_correct: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Serialize)]
struct QecRow {
    t_over_tau: f64,
    coefficient: f64,
    analytic: f64,
    abs_diff: f64,
}

pub fn qec(a: QecArgs) -> Result<()> {
    let rows: Vec<QecRow> = run_curve(a.input, a.model, a.tmax, a.steps, !a.no_correct)?
        .into_iter()
        .map(|p| QecRow {
            t_over_tau: p.t_over_tau,
            coefficient: p.coefficient,
            analytic: p.analytic,
            abs_diff: (p.coefficient - p.analytic).abs(),
        })
        .collect();
    let bytes = tabular(&rows, a.out.format.unwrap_or(Format::Csv))?;
    output::emit(&bytes, a.out.out.as_deref())
}

#[derive(Debug, Args)]
pub struct HardyArgs {
    /// Gaussian peak-height noise; enables the spectral readout path.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Read out through synthesized spectra even without noise.
    #[arg(long)]
    pub spectral: bool,
    /// Use the pure Mermin state instead of its pseudo-pure analogue.
    #[arg(long)]
    pub pure: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Serialize)]
struct HardyReport {
    mode: &'static str,
    state: &'static str,
    noise: Option<f64>,
    trials: Option<usize>,
    seed: Option<u64>,
    entries: Vec<HardyEntry>,
    ch: f64,
    ch_std: Option<f64>,
}

#[derive(Serialize)]
struct HardyRow {
    combo: String,
    gg: f64,
    gr: f64,
    rg: f64,
    rr: f64,
    ch: f64,
    ch_std: Option<f64>,
}

pub fn hardy(a: HardyArgs) -> Result<()> {
    let rho: DensityOperator = if a.pure { hardy::mermin_state()? } else { hardy::mermin_pseudo_pure()? };
    let state = if a.pure { "pure" } else { "pseudo-pure" };
    let setup = ReadoutSetup::default();
    let report = match a.noise {
        Some(sigma) => {
            let r = hardy::noisy_ch(&rho, &setup, sigma, a.trials, a.seed)?;
            HardyReport {
                mode: "spectral-noisy",
                state,
                noise: Some(sigma),
                trials: Some(a.trials),
                seed: Some(a.seed),
                entries: r.mean_table,
                ch: r.mean,
                ch_std: Some(r.std_dev),
            }
        }
        None => {
            let entries = if a.spectral {
                hardy::Combo::ALL
                    .iter()
                    .map(|&c| hardy::readout_protocol(&rho, c, &setup))
                    .collect::<spinops::Result<Vec<_>>>()?
            } else {
                hardy::hardy_table(&rho)?.entries
            };
            HardyReport {
                mode: if a.spectral { "spectral" } else { "direct" },
                state,
                noise: None,
                trials: None,
                seed: None,
                ch: hardy::ch_value(&entries)?,
                entries,
                ch_std: None,
            }
        }
    };
    let bytes = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => output::json(&report)?,
        Format::Csv => {
            let rows: Vec<HardyRow> = report
                .entries
                .iter()
                .map(|e| HardyRow {
                    combo: e.combo.to_string(),
                    gg: e.probabilities[0],
                    gr: e.probabilities[1],
                    rg: e.probabilities[2],
                    rr: e.probabilities[3],
                    ch: report.ch,
                    ch_std: report.ch_std,
                })
                .collect();
            output::csv(&rows)?
        }
        Format::Text => bail!("hardy writes csv or json"),
    };
    output::emit(&bytes, a.out.out.as_deref())
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Operator file (text format or JSON).
    #[arg(long)]
    pub state: PathBuf,
    /// Spin-system JSON with `n`, `offsets_hz` and `j_hz`.
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long, default_value_t = 1024)]
    pub points: usize,
    /// Dwell time in seconds.
    #[arg(long, default_value_t = 1.0 / 2048.0)]
    pub dwell: f64,
    /// Line broadening 1/T₂* in s⁻¹.
    #[arg(long, default_value_t = 10.0)]
    pub broadening: f64,
    /// Observed spins (1-based, comma separated); all spins when omitted.
    #[arg(long, value_delimiter = ',')]
    pub observe: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub zero_fill: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Serialize)]
struct SpectrumRow {
    freq_hz: f64,
    re: f64,
    im: f64,
}

pub fn spectrum(a: SpectrumArgs) -> Result<()> {
    let rho = read_operator(&a.state)?;
    let system = read_system(&a.system)?;
    ensure!(rho.n() == system.n(), "state has {} spins but the system has {}", rho.n(), system.n());
    let observed = if a.observe.is_empty() {
        (0..system.n()).collect()
    } else {
        a.observe.iter().map(|&k| spin(k, system.n())).collect::<Result<Vec<_>>>()?
    };
    let acq = AcquisitionParams::new(a.dwell, a.points, a.broadening, observed)?.with_zero_fill(a.zero_fill)?;
    let rows: Vec<SpectrumRow> = synth_spectrum(&fid(&rho, &system, &acq)?, &acq)?
        .into_iter()
        .map(|(f, v)| SpectrumRow { freq_hz: f, re: v.re, im: v.im })
        .collect();
    let bytes = tabular(&rows, a.out.format.unwrap_or(Format::Csv))?;
    output::emit(&bytes, a.out.out.as_deref())
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PrepKind {
    /// Traceless part of the high-temperature equilibrium state.
    Equilibrium,
    /// Pseudo-pure computational basis state `--index`.
    PseudoPure,
    /// Cyclic temporal average of the equilibrium state.
    CyclicAvg,
    /// Three-spin conditional pseudo-pure state.
    Conditional,
    /// Four-spin relative pseudo-pure state.
    Relative,
    /// Two-spin gradient preparation (crushed output).
    Gradient,
    /// Averaged error-correction input state.
    QecInput,
}

#[derive(Debug, Args)]
pub struct PrepArgs {
    #[arg(long, value_enum)]
    pub kind: PrepKind,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Basis-state index for pseudo-pure (0 = all spins up).
    #[arg(long, default_value_t = 0)]
    pub index: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

pub fn prep(a: PrepArgs) -> Result<()> {
    let rho = match a.kind {
        PrepKind::Equilibrium => state_prep::equilibrium_hat(a.n)?,
        PrepKind::PseudoPure => state_prep::pseudo_pure_basis(a.n, a.index)?,
        PrepKind::CyclicAvg => state_prep::cyclic_average(&state_prep::equilibrium_hat(a.n)?)?,
        PrepKind::Conditional => state_prep::conditional_pure_3()?,
        PrepKind::Relative => state_prep::relative_pure_4()?,
        PrepKind::Gradient => state_prep::gradient_prep_2spin()?.1,
        PrepKind::QecInput => state_prep::qec_averaged_preparation()?,
    };
    let bytes = operator_bytes(rho.op(), a.out.format.unwrap_or(Format::Text))?;
    output::emit(&bytes, a.out.out.as_deref())
}
