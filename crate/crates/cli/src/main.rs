use std::path::PathBuf;
use std::process::ExitCode;

use cavity_dj::dynamics::DipoleVariant;
use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use config::{parse_grid, Format, Preset, RunConfig};

#[derive(Debug)]
pub enum CliError {
    /// Bad input; exit code 2.
    Validation(String),
    /// Numerical or I/O failure; exit code 1.
    Failure(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

#[derive(Debug, Clone)]
struct Grid(Vec<f64>);

fn grid(s: &str) -> Result<Grid, String> {
    parse_grid(s).map(Grid)
}

#[derive(Parser)]
#[command(
    name = "cavity-dj",
    version,
    about = "Cavity-QED controlled-phase-flip gates and the Deutsch-Jozsa algorithm"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize one CPF gate and print its effective diagonal
    Gate {
        /// Target label as a bit string, qubit 1 first (default: all ones)
        #[arg(long)]
        label: Option<String>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// List the constant function and every canonical balanced function
    Enumerate {
        #[arg(long)]
        n: Option<usize>,
        /// Stop after this many functions
        #[arg(long)]
        limit: Option<u64>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Run the Deutsch-Jozsa circuit for one function
    Dj {
        /// Truth-table mask such as 0x9A, or an ordinal id from `enumerate`
        #[arg(long)]
        function: Option<String>,
        /// Use ideal CPF gates instead of synthesized ones
        #[arg(long)]
        ideal: bool,
        /// Minimum p_zero for the constant verdict
        #[arg(long)]
        threshold: Option<f64>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Fidelity sweeps over preset or custom grids
    Sweep {
        #[arg(value_enum)]
        preset: Option<Preset>,
        /// kappa/omega1 values: `a,b,c` or `start:end:count`
        #[arg(long, value_parser = grid)]
        kappa_grid: Option<Grid>,
        /// Relative timing deviations
        #[arg(long, value_parser = grid, allow_hyphen_values = true)]
        deviation_grid: Option<Grid>,
        #[arg(long, value_parser = grid)]
        eta_grid: Option<Grid>,
        /// delta/omega1 values
        #[arg(long, value_parser = grid)]
        delta_grid: Option<Grid>,
        /// kappa/omega1 curves of the dipole sweep
        #[arg(long, value_parser = grid)]
        kappa_set: Option<Grid>,
        /// Restrict the dipole sweep to one form
        #[arg(long)]
        dipole: Option<DipoleVariant>,
        #[arg(long)]
        function: Option<String>,
        /// Worker threads
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Gate time, runtime scaling and register-size bounds
    Feasibility {
        #[arg(long)]
        omega0_khz: Option<f64>,
        #[arg(long)]
        omega1_khz: Option<f64>,
        /// omega1 / omega0, used when --omega1-khz is absent
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        kappa_ratio: Option<f64>,
        #[arg(long)]
        lifetime_ms: Option<f64>,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        claimed_max_n: Option<usize>,
        /// Register size for the listed atom tracks
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Coupling ratios, atom 1 first, e.g. 1,10,10
    #[arg(long, value_parser = grid)]
    ratios: Option<Grid>,
    /// Coupling of atom 1 in kHz (angular frequency 2 pi f)
    #[arg(long)]
    omega1_khz: Option<f64>,
    /// omega1 / omega for the other atoms when --ratios is absent
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    kappa_ratio: Option<f64>,
    #[arg(long)]
    delta_ratio: Option<f64>,
    #[arg(long)]
    dipole: Option<DipoleVariant>,
    #[arg(long, allow_hyphen_values = true)]
    timing_deviation: Option<f64>,
    #[arg(long)]
    photon_cutoff: Option<usize>,
}

#[derive(Args)]
struct IoArgs {
    /// JSON file with run settings; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ModelArgs {
    fn into_config(self) -> RunConfig {
        RunConfig {
            n: self.n,
            ratios: self.ratios.map(|g| g.0),
            omega1_khz: self.omega1_khz,
            eta: self.eta,
            kappa_ratio: self.kappa_ratio,
            delta_ratio: self.delta_ratio,
            dipole_variant: self.dipole,
            timing_deviation: self.timing_deviation,
            photon_cutoff: self.photon_cutoff,
            ..Default::default()
        }
    }
}

fn with_io(cfg: RunConfig, io: IoArgs) -> Result<RunConfig, CliError> {
    let cfg = RunConfig {
        format: io.format,
        out: io.out,
        ..cfg
    };
    match io.config {
        Some(path) => Ok(cfg.over(RunConfig::load(&path)?)),
        None => Ok(cfg),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gate { label, model, io } => {
            let cfg = RunConfig {
                label,
                ..model.into_config()
            };
            commands::gate(&with_io(cfg, io)?)
        }
        Command::Enumerate { n, limit, io } => {
            let cfg = RunConfig {
                n,
                limit,
                ..Default::default()
            };
            commands::enumerate(&with_io(cfg, io)?)
        }
        Command::Dj {
            function,
            ideal,
            threshold,
            model,
            io,
        } => {
            let cfg = RunConfig {
                function,
                ideal: ideal.then_some(true),
                threshold,
                ..model.into_config()
            };
            commands::dj(&with_io(cfg, io)?)
        }
        Command::Sweep {
            preset,
            kappa_grid,
            deviation_grid,
            eta_grid,
            delta_grid,
            kappa_set,
            dipole,
            function,
            jobs,
            io,
        } => {
            let cfg = RunConfig {
                preset,
                kappa_grid: kappa_grid.map(|g| g.0),
                deviation_grid: deviation_grid.map(|g| g.0),
                eta_grid: eta_grid.map(|g| g.0),
                delta_grid: delta_grid.map(|g| g.0),
                kappa_set: kappa_set.map(|g| g.0),
                variants: dipole.map(|v| vec![v]),
                function,
                jobs,
                ..Default::default()
            };
            commands::sweep(&with_io(cfg, io)?)
        }
        Command::Feasibility {
            omega0_khz,
            omega1_khz,
            eta,
            kappa_ratio,
            lifetime_ms,
            n_min,
            n_max,
            claimed_max_n,
            n,
            io,
        } => {
            let cfg = RunConfig {
                omega0_khz,
                omega1_khz,
                eta,
                kappa_ratio,
                lifetime_ms,
                n_min,
                n_max,
                claimed_max_n,
                n,
                ..Default::default()
            };
            commands::feasibility(&with_io(cfg, io)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
