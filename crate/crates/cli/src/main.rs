//! `jcfb`: presets, free-form runs, spectra, pole searches and the
//! cross-validation suite for the feedback simulators.

mod commands;
mod config;
mod output;
mod presets;
mod quantity;
mod resolve;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use quantity::parse_quantity;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Model(#[from] jcfeedback::Error),
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use jcfeedback::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Model(E::NonFinite { .. }) => 3,
            CliError::Model(E::InvalidParameter { .. } | E::Grid(_) | E::SeriesParams) => 2,
            CliError::Io { .. } | CliError::Model(_) | CliError::ChecksFailed(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "jcfb", version, about = "Time-delayed coherent feedback on a single-excitation atom-cavity system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every parameter-driven subcommand. Precedence: flags, then
/// the `--config` file, then the preset.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Named parameter set (rates normalized to kappa = 1)
    #[arg(long)]
    pub preset: Option<String>,
    /// key = value file with the same names as the long flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Atom-cavity coupling
    #[arg(long, value_parser = parse_quantity, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Coupling to the feedback reservoir
    #[arg(long, value_parser = parse_quantity, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Extra loss (detection) channel
    #[arg(long, value_parser = parse_quantity, allow_hyphen_values = true)]
    pub kappa1: Option<f64>,
    /// Roundtrip delay
    #[arg(long, value_parser = parse_quantity, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// Delay given as kappa * tau (overrides --tau)
    #[arg(long, value_parser = parse_quantity, allow_hyphen_values = true)]
    pub kappa_tau: Option<f64>,
    /// Feedback phase, e.g. `pi` or `2pi`
    #[arg(long, value_parser = parse_quantity, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// End time of the run
    #[arg(long, value_parser = parse_quantity)]
    pub tmax: Option<f64>,
    /// Integration steps per delay period
    #[arg(long)]
    pub steps_per_delay: Option<usize>,
    /// Mode-sum truncation N (modes -N..=N)
    #[arg(long)]
    pub modes: Option<usize>,
    /// Output path (directory for `simulate`, file otherwise)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectrumKind {
    Nofb,
    Cm,
    Dm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FeedbackModel {
    Cm,
    Dm,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one or more backends and write one CSV per model
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated: nofb, cm, dm, modesum
        #[arg(long)]
        models: Option<String>,
    },
    /// Closed-form emission spectrum through the kappa1 channel
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "dm")]
        kind: SpectrumKind,
        /// Emit nofb, cm and dm side by side
        #[arg(long)]
        all: bool,
        /// Half-width of the symmetric frequency grid [default: 10 max(gamma, kappa)]
        #[arg(long, value_parser = parse_quantity)]
        omega_max: Option<f64>,
        #[arg(long, default_value_t = 2001)]
        points: usize,
    },
    /// Run the acceptance checks
    Validate {
        /// Reduced resolution
        #[arg(long, conflicts_with = "full")]
        fast: bool,
        /// Full resolution (default)
        #[arg(long)]
        full: bool,
        /// Restrict to the named checks (name or number; repeatable or comma-separated)
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// Roots of the characteristic function inside a box
    Poles {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "cm")]
        model: FeedbackModel,
        /// Discrete-mode kernel order: a number or `inf`
        #[arg(long, default_value = "inf")]
        order: String,
        #[arg(long, value_parser = parse_quantity, allow_hyphen_values = true)]
        re_min: Option<f64>,
        #[arg(long, value_parser = parse_quantity, allow_hyphen_values = true)]
        re_max: Option<f64>,
        #[arg(long, value_parser = parse_quantity, allow_hyphen_values = true)]
        im_min: Option<f64>,
        #[arg(long, value_parser = parse_quantity, allow_hyphen_values = true)]
        im_max: Option<f64>,
        /// Seeds per box side
        #[arg(long, default_value_t = 20)]
        grid: usize,
        /// Report the stabilization condition and predicted amplitude
        #[arg(long)]
        check_rabi: bool,
    },
    /// Trapped atomic amplitude of the discrete-mode system
    SteadyState {
        #[command(flatten)]
        common: Common,
    },
    /// Normal modes of atom, lossy cavity and effective second cavity
    NormalModes {
        #[command(flatten)]
        common: Common,
        /// Cavity-cavity coupling G [default: 2 sqrt(kappa / tau)]
        #[arg(long, value_parser = parse_quantity)]
        coupling: Option<f64>,
    },
    /// Cavity amplitude from the closed series (gamma = kappa, kappa1 = 0)
    Series {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "dm")]
        model: FeedbackModel,
        /// Number of evenly spaced sample times in [0, tmax]
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long)]
        m_max: Option<usize>,
        #[arg(long)]
        p_max: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { common, models } => commands::simulate(&common, models.as_deref()),
        Command::Spectrum { common, kind, all, omega_max, points } => {
            commands::spectrum(&common, kind, all, omega_max, points)
        }
        Command::Validate { fast, full: _, only } => commands::validate(fast, &only),
        Command::Poles { common, model, order, re_min, re_max, im_min, im_max, grid, check_rabi } => {
            commands::poles(&common, model, &order, [re_min, re_max, im_min, im_max], grid, check_rabi)
        }
        Command::SteadyState { common } => commands::steady_state(&common),
        Command::NormalModes { common, coupling } => commands::normal_modes(&common, coupling),
        Command::Series { common, model, points, m_max, p_max } => {
            commands::series(&common, model, points, m_max, p_max)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // reader closed early, e.g. `| head`
        Err(CliError::Io { ref source, .. }) if source.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
