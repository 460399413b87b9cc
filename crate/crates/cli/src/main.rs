mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

/// Product-operator simulator for liquid-state NMR quantum information processing.
///
/// Spins are numbered from 1 on the command line and in all files.
#[derive(Debug, Parser)]
#[command(name = "spinops", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Signal strength of pseudo-pure preparations.
    Snr(commands::SnrArgs),
    /// Polarization of the averaged pseudo-pure state versus Boltzmann ratio.
    Polarization(commands::PolarizationArgs),
    /// Emit a gate's pulse sequence, or check it against the ideal unitary.
    CompileGate(commands::CompileGateArgs),
    /// Apply a dephasing channel to an operator.
    Dephase(commands::DephaseArgs),
    /// Error-correction decay curve of the data spin.
    Qec(commands::QecArgs),
    /// Hardy/Clauser–Horne probability tables.
    Hardy(commands::HardyArgs),
    /// Synthesize the spectrum of a state.
    Spectrum(commands::SpectrumArgs),
    /// Pseudo-pure and related state constructions.
    Prep(commands::PrepArgs),
    /// Run a subcommand described by a JSON config file.
    Run(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON object with a "subcommand" key; other keys are that subcommand's flags.
    pub config: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output file (written atomically); stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Output format; each subcommand has its own default.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Snr(a) => commands::snr(a),
        Command::Polarization(a) => commands::polarization(a),
        Command::CompileGate(a) => commands::compile_gate(a),
        Command::Dephase(a) => commands::dephase(a),
        Command::Qec(a) => commands::qec(a),
        Command::Hardy(a) => commands::hardy(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Prep(a) => commands::prep(a),
        Command::Run(a) => {
            let argv = config::load(&a.config)?;
            let cli = Cli::try_parse_from(argv)?;
            if matches!(cli.command, Command::Run(_)) {
                anyhow::bail!("a config file cannot invoke `run`");
            }
            dispatch(cli.command)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
