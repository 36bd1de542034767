//! `nextjump`: survival curves, eigenvalues, figure data, Monte Carlo and
//! parameter sweeps for a driven resonator dispersively coupled to a qubit.
//!
//! Exit codes: 0 success, 1 runtime or physics error, 2 usage error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] nextjump_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "nextjump", version, about = "Next-jump statistics of a driven, damped resonator coupled to a qubit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Physical parameters and output options shared by all subcommands.
/// Rates are in units of the chosen time scale; κ defaults to 1.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Resonator damping rate κ.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Mean photon number n̄ of the driven steady state.
    #[arg(long, allow_hyphen_values = true)]
    pub nbar: Option<f64>,
    /// Dispersive shift χ of the ground-level resonance.
    #[arg(long, allow_hyphen_values = true)]
    pub chi: Option<f64>,
    /// Real Rabi coupling Ω.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// key = value file mirroring the long flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Level {
    G,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    /// Resonant if χ = Ω = 0, Detuned if Ω = 0, else Coupled.
    Auto,
    Resonant,
    Detuned,
    Coupled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Nbar,
    Chi,
    Omega,
    Kappa,
}

#[derive(Args, Debug)]
pub struct SurvivalArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub level: Option<Level>,
    #[arg(long, value_enum)]
    pub regime: Option<RegimeArg>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Number of evenly spaced output times, including t = 0.
    #[arg(long)]
    pub points: Option<usize>,
    /// Highest retained Fock index (default scales with n̄).
    #[arg(long)]
    pub n_max: Option<usize>,
}

#[derive(Args, Debug)]
pub struct EigenArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct FigureArgs {
    /// Figure number: 1 (log W/n̄) or 2 (scaled decrement Y).
    #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
    pub which: u8,
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub tau_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// n̄ values for figure 1.
    #[arg(long, value_delimiter = ',')]
    pub nbar_list: Vec<f64>,
    /// χ/κ for figure 2.
    #[arg(long)]
    pub chi_over_kappa: Option<f64>,
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub level: Option<Level>,
    #[arg(long, value_enum)]
    pub regime: Option<RegimeArg>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub n_samples: Option<usize>,
    /// RNG seed; falls back to NEXTJUMP_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// Where to write the JSON summary (stdout when omitted).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub axis: Option<Axis>,
    /// Comma-separated values of the swept parameter.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Vec<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Survival probability W(t): numeric engine and closed forms.
    Survival(SurvivalArgs),
    /// Roots of the reduced-model characteristic cubic.
    Eigen(EigenArgs),
    /// Data for figure 1 or figure 2.
    Figure(FigureArgs),
    /// Monte Carlo next-jump times with a goodness-of-fit report.
    Mc(McArgs),
    /// Readout figures of merit across one parameter.
    Sweep(SweepArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Survival(a) => commands::survival(a),
        Command::Eigen(a) => commands::eigen(a),
        Command::Figure(a) => commands::figure(a),
        Command::Mc(a) => commands::mc(a),
        Command::Sweep(a) => commands::sweep(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // --help and --version exit 0; parse errors exit 2
            e.exit();
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nextjump: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
